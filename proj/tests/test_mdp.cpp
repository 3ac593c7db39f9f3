#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "oracles.hpp"
#include "vqvi/exact.hpp"
#include "vqvi/mdp.hpp"
#include "vqvi/mdp_io.hpp"

using namespace vqvi;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("vqvi_test_" + name);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST(Validate, SingleStateIsValid) {
    EXPECT_TRUE(validate(ref::single_state(0.5, 0.9)).empty());
}

TEST(Validate, RowSumViolationNamesThePair) {
    const Dmdp mdp(1, 1, 0.9, {0.5}, {0.9});
    const auto v = validate(mdp);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].message, "row (0,0) sums to 0.9");
    EXPECT_EQ(v[0].state, 0u);
    EXPECT_EQ(v[0].action, 0u);
}

TEST(Validate, RewardOutOfRange) {
    const Dmdp mdp(1, 1, 0.9, {1.5}, {1.0});
    const auto v = validate(mdp);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].message, "reward (0,0) outside [0,1]");
}

TEST(Validate, GammaAndNegativeProbability) {
    const Dmdp bad_gamma(1, 1, 1.0, {0.5}, {1.0});
    EXPECT_EQ(validate(bad_gamma).size(), 1u);
    const Dmdp negative(2, 1, 0.5, {0.0, 0.0}, {1.5, -0.5, 0.0, 1.0});
    const auto v = validate(negative);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].message.find("negative"), std::string::npos);
    EXPECT_THROW(require_valid(negative), std::invalid_argument);
}

TEST(Validate, HorizonMustBePositive) {
    const FiniteHorizonMdp fh(ref::single_state(0.5, 0.9), 0);
    EXPECT_EQ(validate(fh).size(), 1u);
}

TEST(Model, ShapeMismatchThrows) {
    EXPECT_THROW(Dmdp(2, 1, 0.5, {0.0}, {1.0, 0.0, 0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(Dmdp(2, 1, 0.5, {0.0, 0.0}, {1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(Dmdp(0, 1, 0.5, {}, {}), std::invalid_argument);
}

TEST(GenerateRandom, SingleStateIsPointMass) {
    const Dmdp mdp = generate_random({1, 1, 0.9, 1.0, 7});
    EXPECT_EQ(mdp.prob(0, 0, 0), 1.0);
}

TEST(GenerateRandom, Deterministic) {
    EXPECT_EQ(generate_random({4, 2, 0.9, 1.0, 42}), generate_random({4, 2, 0.9, 1.0, 42}));
    EXPECT_FALSE(generate_random({4, 2, 0.9, 1.0, 42}) == generate_random({4, 2, 0.9, 1.0, 43}));
}

TEST(GenerateRandom, RowsAreStochasticAtLowConcentration) {
    const Dmdp mdp = generate_random({10, 5, 0.9, 0.1, 1});
    EXPECT_TRUE(validate(mdp).empty());
}

TEST(GenerateRandom, StochasticAcrossSeeds) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Dmdp mdp = generate_random({1 + seed % 9, 1 + seed % 4, 0.7, 0.05 + 0.1 * static_cast<double>(seed % 5), seed});
        for (std::size_t s = 0; s < mdp.n_states(); ++s) {
            for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
                double sum = 0.0;
                for (double p : mdp.row(s, a)) {
                    EXPECT_GE(p, 0.0);
                    sum += p;
                }
                EXPECT_LE(std::abs(sum - 1.0), 1e-12);
                EXPECT_GE(mdp.reward(s, a), 0.0);
                EXPECT_LE(mdp.reward(s, a), 1.0);
            }
        }
    }
}

TEST(GenerateRandom, RejectsBadSpec) {
    EXPECT_THROW(generate_random({3, 2, 0.9, 0.0, 1}), std::invalid_argument);
    EXPECT_THROW(generate_random({3, 2, 1.0, 1.0, 1}), std::invalid_argument);
    EXPECT_THROW(generate_random({0, 2, 0.9, 1.0, 1}), std::invalid_argument);
}

TEST(GenerateChain, TwoStateValues) {
    const Dmdp mdp = generate_chain(2, 0.5, 0.0);
    const ValueVector v = policy_evaluation(mdp, {0, 0});
    EXPECT_NEAR(v[1], 2.0, 1e-12);
    EXPECT_NEAR(v[0], 1.0, 1e-12);
}

TEST(GenerateChain, Structure) {
    const Dmdp mdp = generate_chain(5, 0.9, 0.2);
    EXPECT_TRUE(validate(mdp).empty());
    EXPECT_DOUBLE_EQ(mdp.prob(1, 0, 2), 0.8);
    EXPECT_DOUBLE_EQ(mdp.prob(1, 0, 1), 0.2);
    EXPECT_DOUBLE_EQ(mdp.prob(1, 1, 0), 0.8);
    EXPECT_DOUBLE_EQ(mdp.prob(4, 0, 4), 1.0);
    EXPECT_DOUBLE_EQ(mdp.prob(0, 1, 0), 1.0);
    EXPECT_EQ(mdp.reward(4, 0), 1.0);
    EXPECT_EQ(mdp.reward(3, 0), 0.0);
    EXPECT_EQ(generate_chain(5, 0.9, 0.2), generate_chain(5, 0.9, 0.2));
}

TEST(GenerateChain, OptimalValuesMatchPolicyEnumeration) {
    const Dmdp mdp = generate_chain(5, 0.9, 0.2);
    const ValueVector vi = exact_value_iteration(mdp, 1e-10).v;
    const ValueVector brute = ref::enumerate_optimal_values(mdp);
    EXPECT_LE(max_abs_diff(vi, brute), 1e-10);
}

TEST(GenerateChain, RejectsBadArguments) {
    EXPECT_THROW(generate_chain(1, 0.9, 0.0), std::invalid_argument);
    EXPECT_THROW(generate_chain(3, 0.9, 1.0), std::invalid_argument);
}

TEST(Serialization, RoundTripIsBitExact) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Dmdp mdp = generate_random({6, 3, 0.37 + 0.05 * static_cast<double>(seed), 0.3, seed});
        const auto path = temp_file("roundtrip.json");
        save(mdp, path);
        EXPECT_EQ(load(path), mdp);
        EXPECT_EQ(from_json(to_json(mdp)), mdp);
    }
}

TEST(Serialization, NegativeProbabilityRejected) {
    const auto path = temp_file("negative.json");
    write_text(path, R"({"n_states":2,"n_actions":1,"gamma":0.5,"reward":[[0.1],[0.2]],)"
                     R"("transition":[[[1.5,-0.5]],[[0.0,1.0]]]})");
    try {
        load(path);
        FAIL() << "expected MdpFormatError";
    } catch (const MdpFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("negative"), std::string::npos) << e.what();
    }
}

TEST(Serialization, MissingGammaNamesTheField) {
    try {
        from_json(R"({"n_states":1,"n_actions":1,"reward":[[0.5]],"transition":[[[1.0]]]})");
        FAIL() << "expected MdpFormatError";
    } catch (const MdpFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos) << e.what();
    }
}

TEST(Serialization, MalformedAndShapeErrors) {
    EXPECT_THROW(from_json("{not json"), MdpFormatError);
    EXPECT_THROW(from_json(R"({"n_states":2,"n_actions":1,"gamma":0.5,"reward":[[0.5]],"transition":[[[1.0]]]})"),
                 MdpFormatError);
    EXPECT_THROW(from_json(R"({"n_states":1,"n_actions":1,"gamma":0.5,"reward":[[NaN]],"transition":[[[1.0]]]})"),
                 MdpFormatError);
    EXPECT_THROW(from_json(R"({"n_states":1,"n_actions":1,"gamma":0.5,"reward":[[1e999]],"transition":[[[1.0]]]})"),
                 MdpFormatError);
    EXPECT_THROW(load(temp_file("does_not_exist.json")), MdpFormatError);
}

TEST(Norms, MaxNormAndDiff) {
    EXPECT_EQ(max_norm(std::vector<double>{1.0, -3.0, 2.0}), 3.0);
    EXPECT_EQ(max_abs_diff(std::vector<double>{1.0, 2.0}, std::vector<double>{1.5, 0.0}), 2.0);
    EXPECT_THROW(max_abs_diff(std::vector<double>{1.0}, std::vector<double>{}), std::invalid_argument);
}
