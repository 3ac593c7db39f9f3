#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "vqvi/sampling.hpp"

namespace vqvi::detail {

/// Runs fn(s, a) for every pair, split across `threads` workers by pair index.
template <class Fn>
void for_each_pair(std::size_t n_states, std::size_t n_actions, unsigned threads, Fn&& fn) {
    const std::size_t pairs = n_states * n_actions;
    if (threads <= 1 || pairs <= 1) {
        for (std::size_t k = 0; k < pairs; ++k) fn(k / n_actions, k % n_actions);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, pairs);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < pairs; k += workers) fn(k / n_actions, k % n_actions);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Next-state counts of n draws for (s,a).
inline std::vector<std::uint64_t> draw_histogram(GenerativeOracle& oracle, std::size_t s,
                                                 std::size_t a, std::uint64_t n) {
    std::vector<std::uint64_t> hist(oracle.n_states(), 0);
    oracle.for_each_sample(s, a, n, [&](std::size_t t) { ++hist[t]; });
    return hist;
}

/// Mean of f over the histogram, accumulated per distinct state.
template <class F>
double histogram_mean(const std::vector<std::uint64_t>& hist, std::uint64_t n, F&& f) {
    double acc = 0.0;
    for (std::size_t t = 0; t < hist.size(); ++t)
        if (hist[t] != 0) acc += static_cast<double>(hist[t]) * f(t);
    return acc / static_cast<double>(n);
}

}  // namespace vqvi::detail

namespace vqvi::detail {

/// Lower-confidence shift of an empirical mean of a vector with sup norm `norm`, clipped to [0, norm].
inline double shifted_estimate(double mean, double variance, double alpha1, double norm) {
    const double w = mean - std::sqrt(2.0 * alpha1 * variance) - 4.0 * std::pow(alpha1, 0.75) * norm -
                     (2.0 / 3.0) * alpha1 * norm;
    return std::clamp(w, 0.0, norm);
}

/// ceil(x) as a count, at least 1.
inline std::uint64_t ceil_count(double x) {
    if (!std::isfinite(x) || x >= 1.8e19) throw std::overflow_error("sample count overflows 64 bits");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(x)));
}

}  // namespace vqvi::detail
