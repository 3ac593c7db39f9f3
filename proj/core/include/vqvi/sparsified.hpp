#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vqvi/mdp.hpp"
#include "vqvi/sampling.hpp"

namespace vqvi {

struct SparseEntry {
    std::uint32_t state = 0;
    std::uint64_t count = 0;

    bool operator==(const SparseEntry&) const = default;
};

/**
 * Empirical model from m draws per (s,a). Rows hold (state, count) pairs in
 * increasing state order; the weight of an entry is count / m, so every row
 * sums to exactly m / m.
 */
class SparsifiedMdp {
public:
    SparsifiedMdp(std::size_t n_states, std::size_t n_actions, double gamma, std::uint64_t m,
                  std::vector<double> reward, std::vector<std::vector<SparseEntry>> rows);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }
    double gamma() const { return gamma_; }
    std::uint64_t samples_per_pair() const { return m_; }

    double reward(std::size_t s, std::size_t a) const { return reward_[s * n_actions_ + a]; }
    std::span<const SparseEntry> row(std::size_t s, std::size_t a) const { return rows_[s * n_actions_ + a]; }

    std::size_t nnz() const;

    /// Dense Dmdp with P(s,a,s') = count / m.
    Dmdp densify() const;

private:
    std::size_t n_states_;
    std::size_t n_actions_;
    double gamma_;
    std::uint64_t m_;
    std::vector<double> reward_;
    std::vector<std::vector<SparseEntry>> rows_;
};

/// Draws exactly m samples per (s,a). The oracle must carry a discount.
SparsifiedMdp sparsify(GenerativeOracle& oracle, std::uint64_t m_per_sa, unsigned threads = 1);

/// ceil(c_sparse (1-gamma)^-3 epsilon^-2 ln(SA/delta))
std::uint64_t schedule_m(double gamma, double epsilon, double delta, std::size_t n_states,
                         std::size_t n_actions, double c_sparse = 1.0);

struct SparsifiedResult {
    ValueVector v;
    Policy pi;
    std::uint64_t m = 0;
    std::uint64_t total_samples = 0;
};

/// Sparsify with schedule_m, then exact value iteration on the empirical model to `tol`.
SparsifiedResult solve_via_sparsified(GenerativeOracle& oracle, double epsilon, double delta,
                                      double c_sparse = 1.0, double tol = 1e-10);

/// Same as above with an explicit m.
SparsifiedResult solve_via_sparsified_m(GenerativeOracle& oracle, std::uint64_t m, double tol = 1e-10);

}  // namespace vqvi
