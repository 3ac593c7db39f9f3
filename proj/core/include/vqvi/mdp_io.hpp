#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "vqvi/mdp.hpp"

namespace vqvi {

/// Raised when an MDP document cannot be turned into a valid Dmdp.
class MdpFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * JSON document of the form
 *
 *   {"n_states": int, "n_actions": int, "gamma": float,
 *    "reward": [[float]], "transition": [[[float]]]}
 *
 * with transition indexed [s][a][s']. Doubles are written with
 * round-trip precision so save followed by load is bit-exact.
 */
std::string to_json(const Dmdp& mdp);

/// Parses and validates. Throws MdpFormatError naming the offending field.
Dmdp from_json(const std::string& text);

void save(const Dmdp& mdp, const std::filesystem::path& path);
/// Throws MdpFormatError if the file cannot be read, parsed or validated.
Dmdp load(const std::filesystem::path& path);

}  // namespace vqvi
