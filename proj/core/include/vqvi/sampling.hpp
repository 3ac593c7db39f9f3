#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vqvi/mdp.hpp"

namespace vqvi {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key of the (s,a) stream under a master seed.
constexpr std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t s, std::uint64_t a) {
    return mix64(mix64(master_seed ^ 0x6a09e667f3bcc909ULL) + mix64(s * 0x9e3779b97f4a7c15ULL + 1) +
                 mix64(a * 0xc2b2ae3d27d4eb4fULL + 2));
}

/**
 * Counter-based generator: the k-th output is mix64(key + (k+1) * golden).
 * Its entire state is (key, counter), so any draw is addressable.
 */
class CounterStream {
public:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    CounterStream() = default;
    explicit CounterStream(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    std::uint64_t next() { return mix64(key_ + (++counter_) * kGolden); }
    std::uint64_t counter() const { return counter_; }
    std::uint64_t key() const { return key_; }

    /// Uniform double in [0,1) from 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/**
 * Vose alias table over {0, ..., n-1}. One 64-bit word per draw: the
 * high half of bits*n picks the column, the low half is the coin.
 */
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(std::span<const double> probabilities);

    std::size_t size() const { return threshold_.size(); }

    std::size_t draw(std::uint64_t bits) const {
        const unsigned __int128 wide = static_cast<unsigned __int128>(bits) * threshold_.size();
        const auto column = static_cast<std::size_t>(wide >> 64);
        const auto coin = static_cast<std::uint64_t>(wide);
        // Branch-free select: the coin is unpredictable by design.
        const std::size_t other = alias_[column];
        const std::size_t keep = std::size_t{0} - static_cast<std::size_t>(coin < threshold_[column]);
        return other ^ ((other ^ column) & keep);
    }

private:
    // Coin thresholds scaled to 2^64; a column keeps itself iff coin < threshold.
    std::vector<std::uint64_t> threshold_;
    std::vector<std::uint32_t> alias_;
};

/// Exact per-(s,a) draw counts and their total.
struct SampleCount {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<std::uint64_t> per_sa;  // row-major [s][a]
    std::uint64_t total = 0;

    std::uint64_t operator()(std::size_t s, std::size_t a) const { return per_sa[s * n_actions + a]; }
};

/**
 * Generative model: O(1) draws of s' ~ P_{s,a} with exact accounting.
 *
 * Rewards (and the discount, when built from a Dmdp) are known to the
 * learner; transitions are only reachable through draws. Each (s,a) owns
 * an independent counter stream keyed by (master_seed, s, a), so the
 * samples for one pair never depend on calls made for other pairs.
 *
 * Concurrent calls on distinct (s,a) pairs are safe. Calls on the same
 * pair must be serialized by the caller. sample_count() is exact when no
 * batch is in flight.
 */
class GenerativeOracle {
public:
    GenerativeOracle(const TransitionModel& model, std::uint64_t master_seed,
                     std::optional<double> discount = std::nullopt);

    GenerativeOracle(GenerativeOracle&& other) noexcept;
    GenerativeOracle& operator=(GenerativeOracle&&) = delete;
    GenerativeOracle(const GenerativeOracle&) = delete;
    GenerativeOracle& operator=(const GenerativeOracle&) = delete;

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }
    std::uint64_t master_seed() const { return master_seed_; }

    double reward(std::size_t s, std::size_t a) const { return reward_[s * n_actions_ + a]; }

    /// Discount of the underlying DMDP; throws std::logic_error if none was given.
    double discount() const;

    std::vector<std::size_t> sample_batch(std::size_t s, std::size_t a, std::size_t n);

    /// Streams n draws for (s,a) into fn(next_state) without allocating.
    template <class Fn>
    void for_each_sample(std::size_t s, std::size_t a, std::uint64_t n, Fn&& fn) {
        const std::size_t k = checked_index(s, a);
        const AliasTable& table = tables_[k];
        CounterStream& stream = streams_[k];
        for (std::uint64_t j = 0; j < n; ++j) fn(table.draw(stream.next()));
        total_.fetch_add(n, std::memory_order_relaxed);
    }

    std::uint64_t count(std::size_t s, std::size_t a) const {
        return streams_[checked_index(s, a)].counter();
    }
    std::uint64_t total() const { return total_.load(std::memory_order_relaxed); }
    SampleCount sample_count() const;

private:
    std::size_t checked_index(std::size_t s, std::size_t a) const {
        if (s >= n_states_ || a >= n_actions_)
            throw std::out_of_range("state-action (" + std::to_string(s) + "," +
                                    std::to_string(a) + ") out of range");
        return s * n_actions_ + a;
    }

    std::size_t n_states_;
    std::size_t n_actions_;
    std::uint64_t master_seed_;
    std::optional<double> discount_;
    std::vector<double> reward_;
    std::vector<AliasTable> tables_;
    // The counter of each stream doubles as the per-(s,a) draw count.
    std::vector<CounterStream> streams_;
    std::atomic<std::uint64_t> total_{0};
};

/// Validates the model, then builds alias tables and seeds the streams.
GenerativeOracle build_oracle(const Dmdp& mdp, std::uint64_t master_seed);
GenerativeOracle build_oracle(const FiniteHorizonMdp& mdp, std::uint64_t master_seed);

}  // namespace vqvi
