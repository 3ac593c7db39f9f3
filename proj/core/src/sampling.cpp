#include "vqvi/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vqvi {

namespace {

std::uint64_t to_threshold(double q) {
    if (!(q > 0.0)) return 0;
    const double scaled = std::ldexp(q, 64);
    if (scaled >= 0x1.0p64) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(scaled);
}

}  // namespace

AliasTable::AliasTable(std::span<const double> probabilities) {
    const std::size_t n = probabilities.size();
    if (n == 0) throw std::invalid_argument("alias table over an empty support");
    if (n > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("alias table support too large");

    threshold_.assign(n, 0);
    alias_.resize(n);
    for (std::size_t i = 0; i < n; ++i) alias_[i] = static_cast<std::uint32_t>(i);

    double sum = 0.0;
    std::size_t heaviest = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(probabilities[i] >= 0.0) || !std::isfinite(probabilities[i]))
            throw std::invalid_argument("alias table needs finite nonnegative weights");
        sum += probabilities[i];
        if (probabilities[i] > probabilities[heaviest]) heaviest = i;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("alias table weights sum to zero");

    std::vector<double> scaled(n);
    std::vector<std::size_t> small;
    std::vector<std::size_t> large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = probabilities[i] / sum * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }

    std::vector<double> keep(n, 1.0);
    while (!small.empty() && !large.empty()) {
        const std::size_t lo = small.back();
        small.pop_back();
        const std::size_t hi = large.back();
        keep[lo] = scaled[lo];
        alias_[lo] = static_cast<std::uint32_t>(hi);
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0;
        if (scaled[hi] < 1.0) {
            large.pop_back();
            small.push_back(hi);
        }
    }
    // Leftovers are rounding residue: full columns, unless the state has no mass.
    for (std::size_t i : large) keep[i] = 1.0;
    for (std::size_t i : small) {
        if (probabilities[i] > 0.0) {
            keep[i] = 1.0;
        } else {
            keep[i] = 0.0;
            alias_[i] = static_cast<std::uint32_t>(heaviest);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        threshold_[i] = to_threshold(keep[i]);
        if (threshold_[i] == std::numeric_limits<std::uint64_t>::max())
            alias_[i] = static_cast<std::uint32_t>(i);
    }
}

GenerativeOracle::GenerativeOracle(const TransitionModel& model, std::uint64_t master_seed,
                                   std::optional<double> discount)
    : n_states_(model.n_states()),
      n_actions_(model.n_actions()),
      master_seed_(master_seed),
      discount_(discount),
      reward_(model.rewards().begin(), model.rewards().end()) {
    tables_.reserve(n_states_ * n_actions_);
    streams_.reserve(n_states_ * n_actions_);
    for (std::size_t s = 0; s < n_states_; ++s) {
        for (std::size_t a = 0; a < n_actions_; ++a) {
            tables_.emplace_back(model.row(s, a));
            streams_.emplace_back(stream_key(master_seed, s, a));
        }
    }
}

GenerativeOracle::GenerativeOracle(GenerativeOracle&& other) noexcept
    : n_states_(other.n_states_),
      n_actions_(other.n_actions_),
      master_seed_(other.master_seed_),
      discount_(other.discount_),
      reward_(std::move(other.reward_)),
      tables_(std::move(other.tables_)),
      streams_(std::move(other.streams_)),
      total_(other.total_.load()) {}

double GenerativeOracle::discount() const {
    if (!discount_) throw std::logic_error("oracle was built without a discount factor");
    return *discount_;
}

std::vector<std::size_t> GenerativeOracle::sample_batch(std::size_t s, std::size_t a,
                                                        std::size_t n) {
    std::vector<std::size_t> out;
    out.reserve(n);
    for_each_sample(s, a, n, [&](std::size_t t) { out.push_back(t); });
    return out;
}

SampleCount GenerativeOracle::sample_count() const {
    SampleCount c;
    c.n_states = n_states_;
    c.n_actions = n_actions_;
    c.per_sa.reserve(streams_.size());
    for (const auto& st : streams_) c.per_sa.push_back(st.counter());
    c.total = total();
    return c;
}

GenerativeOracle build_oracle(const Dmdp& mdp, std::uint64_t master_seed) {
    require_valid(mdp);
    return GenerativeOracle(mdp, master_seed, mdp.gamma());
}

GenerativeOracle build_oracle(const FiniteHorizonMdp& mdp, std::uint64_t master_seed) {
    require_valid(mdp);
    return GenerativeOracle(mdp, master_seed);
}

}  // namespace vqvi
