#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vqvi/finite_horizon.hpp"
#include "vqvi/mdp.hpp"
#include "vqvi/vrqvi.hpp"

namespace vqvi::cli {

enum class SolverKind { vqvi, sparsified, fh_vqvi, exact_vi, exact_pi };

std::optional<SolverKind> parse_solver(std::string_view name);
std::string_view solver_name(SolverKind kind);

struct RunSpec {
    SolverKind solver = SolverKind::vqvi;
    Dmdp mdp;
    std::size_t horizon = 0;  // fh-vqvi only
    std::optional<double> epsilon;
    double delta = 0.1;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    double c_sparse = 1.0;
    std::optional<std::uint64_t> m;  // sparsified: overrides the schedule
    VqviConstants constants;
    FhConstants fh_constants;
    unsigned threads = 1;
    bool timing = true;
    std::string run_id;
};

struct ExperimentReport {
    std::string run_id;
    std::string solver;
    std::size_t states = 0;
    std::size_t actions = 0;
    std::optional<double> gamma;
    std::optional<std::size_t> horizon;
    std::optional<double> epsilon;
    double delta = 0.0;
    double kappa = 0.0;
    std::uint64_t seed = 0;
    std::size_t meta_iterations = 0;
    std::optional<std::uint64_t> m;
    std::uint64_t total_samples = 0;
    std::uint64_t per_sa_min = 0;
    std::uint64_t per_sa_median = 0;
    std::uint64_t per_sa_max = 0;
    /// ||v* - v^pi||; for sparsified, ||v_hat* - v*||.
    double achieved_error = 0.0;
    /// sparsified only: ||v* - v^pi|| of the greedy policy.
    std::optional<double> policy_error;
    bool success = false;
    double wall_time_seconds = 0.0;
};

/// Runs one solver on its own freshly seeded oracle and scores it against the exact optimum.
ExperimentReport run_experiment(const RunSpec& spec);

nlohmann::ordered_json to_json(const ExperimentReport& report);

std::string csv_header();
std::string csv_row(const ExperimentReport& report);

/// Shortest decimal string that round-trips.
std::string format_double(double x);

}  // namespace vqvi::cli
