#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vqvi/exact.hpp"

using namespace vqvi;

namespace {

ValueVector random_vector(std::size_t n, double scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, scale);
    ValueVector v(n);
    for (auto& x : v) x = unit(rng);
    return v;
}

}  // namespace

TEST(Bellman, SingleState) {
    const Dmdp mdp = ref::single_state(1.0, 0.9);
    EXPECT_DOUBLE_EQ(bellman_apply(mdp, {0.0})[0], 1.0);
    EXPECT_DOUBLE_EQ(bellman_apply(mdp, {10.0})[0], 10.0);
    EXPECT_DOUBLE_EQ(bellman_apply_policy(mdp, {0}, {10.0})[0], 10.0);
}

TEST(Bellman, ChainImmediateRewards) {
    const Dmdp mdp = generate_chain(2, 0.5, 0.0);
    EXPECT_EQ(bellman_apply(mdp, {0.0, 0.0}), (ValueVector{0.0, 1.0}));
}

TEST(Bellman, PolicyValueIsFixedPoint) {
    std::mt19937_64 rng(1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Dmdp mdp = generate_random({7, 3, 0.85, 0.7, seed});
        Policy pi(7);
        for (auto& a : pi) a = rng() % 3;
        const ValueVector v = policy_evaluation(mdp, pi);
        EXPECT_LE(max_abs_diff(bellman_apply_policy(mdp, pi, v), v), 1e-10);
    }
}

TEST(Bellman, ContractionAndMonotonicity) {
    std::mt19937_64 rng(2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Dmdp mdp = generate_random({6, 3, 0.9, 1.0, seed});
        const ValueVector v1 = random_vector(6, 10.0, rng);
        const ValueVector v2 = random_vector(6, 10.0, rng);
        EXPECT_LE(max_abs_diff(bellman_apply(mdp, v1), bellman_apply(mdp, v2)),
                  0.9 * max_abs_diff(v1, v2) + 1e-12);

        ValueVector hi = v1;
        for (auto& x : hi) x += std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const ValueVector t1 = bellman_apply(mdp, v1);
        const ValueVector t2 = bellman_apply(mdp, hi);
        Policy pi(6);
        for (auto& a : pi) a = rng() % 3;
        const ValueVector p1 = bellman_apply_policy(mdp, pi, v1);
        const ValueVector p2 = bellman_apply_policy(mdp, pi, hi);
        for (std::size_t s = 0; s < 6; ++s) {
            EXPECT_LE(t1[s], t2[s]);
            EXPECT_LE(p1[s], p2[s]);
        }
    }
}

TEST(Bellman, InvalidPolicyThrows) {
    const Dmdp mdp = generate_chain(3, 0.5, 0.0);
    EXPECT_THROW(bellman_apply_policy(mdp, {0, 2, 0}, {0, 0, 0}), std::invalid_argument);
    EXPECT_THROW(bellman_apply_policy(mdp, {0, 0}, {0, 0, 0}), std::invalid_argument);
    EXPECT_THROW(bellman_apply(mdp, {0, 0}), std::invalid_argument);
}

TEST(ValueIteration, SingleState) {
    const auto res = exact_value_iteration(ref::single_state(1.0, 0.9), 1e-10);
    EXPECT_NEAR(res.v[0], 10.0, 1e-10);
}

TEST(ValueIteration, TwoCycle) {
    const auto res = exact_value_iteration(ref::two_cycle(1.0, 0.0, 0.5), 1e-10);
    EXPECT_NEAR(res.v[0], 4.0 / 3.0, 1e-10);
    EXPECT_NEAR(res.v[1], 2.0 / 3.0, 1e-10);
}

TEST(ValueIteration, ResidualAndAgreement) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dmdp mdp = generate_random({10, 5, 0.9, 1.0, seed});
        const double tol = 1e-8;
        const auto vi = exact_value_iteration(mdp, tol);
        EXPECT_LE(max_abs_diff(bellman_apply(mdp, vi.v), vi.v), 2 * tol);
        EXPECT_LE(max_abs_diff(vi.v, policy_iteration(mdp).v), tol);
    }
    EXPECT_THROW(exact_value_iteration(ref::single_state(1.0, 0.9), 0.0), std::invalid_argument);
}

TEST(PolicyEvaluation, ClosedForms) {
    EXPECT_NEAR(policy_evaluation(ref::single_state(0.3, 0.75), {0})[0], 1.2, 1e-12);
    const ValueVector v = policy_evaluation(ref::two_cycle(1.0, 0.0, 0.5), {0, 0});
    EXPECT_NEAR(v[0], 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(v[1], 2.0 / 3.0, 1e-12);
}

TEST(PolicyEvaluation, MatchesNaiveSolversAndStaysBelowOptimum) {
    std::mt19937_64 rng(3);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Dmdp mdp = generate_random({9, 3, 0.95, 0.4, seed});
        const ValueVector v_star = exact_value_iteration(mdp, 1e-11).v;
        Policy pi(9);
        for (auto& a : pi) a = rng() % 3;
        const ValueVector v = policy_evaluation(mdp, pi);
        EXPECT_LE(max_abs_diff(v, ref::linear_policy_value(mdp, pi)), 1e-10);
        EXPECT_LE(max_abs_diff(v, ref::sweep_policy_value(mdp, pi)), 1e-10);
        for (std::size_t s = 0; s < 9; ++s) EXPECT_LE(v[s], v_star[s] + 1e-9);
    }
}

TEST(PolicyIteration, Trivial) {
    const auto res = policy_iteration(ref::single_state(0.5, 0.5));
    EXPECT_EQ(res.pi, (Policy{0}));
    EXPECT_NEAR(res.v[0], 1.0, 1e-12);
}

TEST(PolicyIteration, ChainGoesRight) {
    const auto res = policy_iteration(generate_chain(5, 0.9, 0.0));
    for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(res.pi[s], 0u) << s;
}

TEST(PolicyIteration, MatchesEnumeration) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Dmdp mdp = generate_random({8, 3, 0.8, 0.5, seed});
        const auto res = policy_iteration(mdp);
        EXPECT_LE(max_abs_diff(res.v, ref::enumerate_optimal_values(mdp)), 1e-9);
        EXPECT_LE(max_abs_diff(res.v, exact_value_iteration(mdp, 1e-11).v), 1e-9);
    }
}

TEST(Greedy, TiesAndZeroValues) {
    const Dmdp flat(1, 3, 0.5, {0.2, 0.2, 0.2}, {1.0, 1.0, 1.0});
    EXPECT_EQ(greedy_policy(flat, {0.0}), (Policy{0}));

    const Dmdp mdp = generate_random({6, 4, 0.9, 1.0, 11});
    const Policy pi = greedy_policy(mdp, ValueVector(6, 0.0));
    for (std::size_t s = 0; s < 6; ++s) {
        std::size_t best = 0;
        for (std::size_t a = 1; a < 4; ++a)
            if (mdp.reward(s, a) > mdp.reward(s, best)) best = a;
        EXPECT_EQ(pi[s], best);
    }
}

TEST(Greedy, GreedyOnOptimumIsOptimal) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dmdp mdp = generate_random({8, 4, 0.9, 1.0, seed});
        const ValueVector v_star = policy_iteration(mdp).v;
        EXPECT_LE(max_abs_diff(policy_evaluation(mdp, greedy_policy(mdp, v_star)), v_star), 1e-9);
    }
}

TEST(BackwardInduction, SmallCases) {
    const Dmdp base = generate_random({4, 3, 0.5, 1.0, 5});
    const auto h1 = fh_backward_induction(with_horizon(base, 1));
    for (std::size_t s = 0; s < 4; ++s) {
        double best = 0.0;
        for (std::size_t a = 0; a < 3; ++a) best = std::max(best, base.reward(s, a));
        EXPECT_DOUBLE_EQ(h1.values[0][s], best);
    }
    const auto h2 = fh_backward_induction(with_horizon(ref::single_state(0.5, 0.5), 2));
    EXPECT_DOUBLE_EQ(h2.values[0][0], 1.0);
    EXPECT_DOUBLE_EQ(h2.values[1][0], 0.5);
}

TEST(BackwardInduction, MatchesEnumeration) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const FiniteHorizonMdp mdp = with_horizon(generate_random({3, 2, 0.5, 0.8, 40 + seed}), 4);
        const auto res = fh_backward_induction(mdp);
        const auto brute = ref::enumerate_fh_optimal(mdp);
        for (std::size_t h = 0; h < 4; ++h) EXPECT_LE(max_abs_diff(res.values[h], brute[h]), 1e-12);
    }
    const auto big = fh_backward_induction(with_horizon(generate_random({6, 2, 0.5, 1.0, 9}), 4));
    EXPECT_EQ(big.values.size(), 4u);
    EXPECT_EQ(big.pi.horizon(), 4u);
}
