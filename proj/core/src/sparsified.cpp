#include "vqvi/sparsified.hpp"

#include <cmath>
#include <stdexcept>

#include "pairwise.hpp"
#include "vqvi/exact.hpp"

namespace vqvi {

SparsifiedMdp::SparsifiedMdp(std::size_t n_states, std::size_t n_actions, double gamma, std::uint64_t m,
                             std::vector<double> reward, std::vector<std::vector<SparseEntry>> rows)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      m_(m),
      reward_(std::move(reward)),
      rows_(std::move(rows)) {
    if (m_ == 0) throw std::invalid_argument("m must be at least 1");
    if (reward_.size() != n_states_ * n_actions_ || rows_.size() != n_states_ * n_actions_)
        throw std::invalid_argument("sparsified model shape mismatch");
    for (const auto& row : rows_) {
        std::uint64_t total = 0;
        for (const auto& e : row) {
            if (e.state >= n_states_ || e.count == 0) throw std::invalid_argument("bad sparse entry");
            total += e.count;
        }
        if (total != m_) throw std::invalid_argument("sparse row counts do not sum to m");
    }
}

std::size_t SparsifiedMdp::nnz() const {
    std::size_t out = 0;
    for (const auto& row : rows_) out += row.size();
    return out;
}

Dmdp SparsifiedMdp::densify() const {
    std::vector<double> transition(n_states_ * n_actions_ * n_states_, 0.0);
    const double inv = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < rows_.size(); ++k)
        for (const auto& e : rows_[k])
            transition[k * n_states_ + e.state] = static_cast<double>(e.count) * inv;
    return Dmdp(n_states_, n_actions_, gamma_, reward_, std::move(transition));
}

SparsifiedMdp sparsify(GenerativeOracle& oracle, std::uint64_t m_per_sa, unsigned threads) {
    if (m_per_sa == 0) throw std::invalid_argument("m must be at least 1");
    const std::size_t n = oracle.n_states();
    const std::size_t na = oracle.n_actions();
    std::vector<std::vector<SparseEntry>> rows(n * na);
    std::vector<double> reward(n * na);
    detail::for_each_pair(n, na, threads, [&](std::size_t s, std::size_t a) {
        const auto hist = detail::draw_histogram(oracle, s, a, m_per_sa);
        auto& row = rows[s * na + a];
        for (std::size_t t = 0; t < n; ++t)
            if (hist[t] != 0) row.push_back({static_cast<std::uint32_t>(t), hist[t]});
        reward[s * na + a] = oracle.reward(s, a);
    });
    return SparsifiedMdp(n, na, oracle.discount(), m_per_sa, std::move(reward), std::move(rows));
}

std::uint64_t schedule_m(double gamma, double epsilon, double delta, std::size_t n_states,
                         std::size_t n_actions, double c_sparse) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(c_sparse > 0.0)) throw std::invalid_argument("c_sparse must be positive");
    if (n_states == 0 || n_actions == 0) throw std::invalid_argument("empty state or action set");
    const double sa = static_cast<double>(n_states) * static_cast<double>(n_actions);
    return detail::ceil_count(c_sparse / std::pow(1.0 - gamma, 3) / (epsilon * epsilon) *
                              std::log(sa / delta));
}

SparsifiedResult solve_via_sparsified_m(GenerativeOracle& oracle, std::uint64_t m, double tol) {
    const std::uint64_t before = oracle.total();
    const Dmdp model = sparsify(oracle, m).densify();
    SparsifiedResult out;
    out.m = m;
    out.v = exact_value_iteration(model, tol).v;
    out.pi = greedy_policy(model, out.v);
    out.total_samples = oracle.total() - before;
    return out;
}

SparsifiedResult solve_via_sparsified(GenerativeOracle& oracle, double epsilon, double delta,
                                      double c_sparse, double tol) {
    const std::uint64_t m =
        schedule_m(oracle.discount(), epsilon, delta, oracle.n_states(), oracle.n_actions(), c_sparse);
    return solve_via_sparsified_m(oracle, m, tol);
}

}  // namespace vqvi
