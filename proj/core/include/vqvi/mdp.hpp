#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vqvi {

/// v[s], one entry per state.
using ValueVector = std::vector<double>;

/// Deterministic stationary policy: action index per state.
using Policy = std::vector<std::size_t>;

/**
 * Dense |S| x |A| table of reals, row-major in the state index.
 *
 * Used for Q-functions and for every other per-(s,a) quantity
 * (estimates, one-step variances, total variances).
 */
class QTable {
public:
    QTable() = default;
    QTable(std::size_t n_states, std::size_t n_actions, double fill = 0.0)
        : n_states_(n_states), n_actions_(n_actions), data_(n_states * n_actions, fill) {}

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double& operator()(std::size_t s, std::size_t a) { return data_[s * n_actions_ + a]; }
    double operator()(std::size_t s, std::size_t a) const { return data_[s * n_actions_ + a]; }

    std::span<const double> row(std::size_t s) const {
        return {data_.data() + s * n_actions_, n_actions_};
    }
    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    bool operator==(const QTable&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> data_;
};

using VarianceTable = QTable;
using TotalVarianceTable = QTable;

/// Non-stationary policy pi(s, h) for stages h = 0..H-1.
class NonStationaryPolicy {
public:
    NonStationaryPolicy() = default;
    NonStationaryPolicy(std::size_t n_states, std::size_t horizon, std::size_t fill = 0)
        : n_states_(n_states), horizon_(horizon), data_(n_states * horizon, fill) {}

    std::size_t n_states() const { return n_states_; }
    std::size_t horizon() const { return horizon_; }

    std::size_t& operator()(std::size_t s, std::size_t h) { return data_[h * n_states_ + s]; }
    std::size_t operator()(std::size_t s, std::size_t h) const { return data_[h * n_states_ + s]; }

    /// The stationary slice pi(., h).
    Policy stage(std::size_t h) const {
        return {data_.begin() + static_cast<std::ptrdiff_t>(h * n_states_),
                data_.begin() + static_cast<std::ptrdiff_t>((h + 1) * n_states_)};
    }

    bool operator==(const NonStationaryPolicy&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t horizon_ = 0;
    std::vector<std::size_t> data_;
};

/**
 * States, actions, deterministic rewards r[s][a] and the transition
 * tensor P[s][a][s'] stored densely in row-major order.
 *
 * Construction only checks shapes; use validate() for the stochasticity
 * and reward-range invariants.
 */
class TransitionModel {
public:
    TransitionModel() = default;
    TransitionModel(std::size_t n_states, std::size_t n_actions, std::vector<double> reward,
                    std::vector<double> transition);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double reward(std::size_t s, std::size_t a) const { return reward_[s * n_actions_ + a]; }
    double prob(std::size_t s, std::size_t a, std::size_t next) const {
        return transition_[(s * n_actions_ + a) * n_states_ + next];
    }
    std::span<const double> row(std::size_t s, std::size_t a) const {
        return {transition_.data() + (s * n_actions_ + a) * n_states_, n_states_};
    }

    std::span<const double> rewards() const { return reward_; }
    std::span<const double> transitions() const { return transition_; }

    /// P_{s,a}^T v
    double expect(std::size_t s, std::size_t a, std::span<const double> v) const;

    bool operator==(const TransitionModel&) const = default;

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> reward_;
    std::vector<double> transition_;
};

/// Discounted MDP (S, A, P, r, gamma).
class Dmdp : public TransitionModel {
public:
    Dmdp() = default;
    Dmdp(TransitionModel model, double gamma) : TransitionModel(std::move(model)), gamma_(gamma) {}
    Dmdp(std::size_t n_states, std::size_t n_actions, double gamma, std::vector<double> reward,
         std::vector<double> transition)
        : TransitionModel(n_states, n_actions, std::move(reward), std::move(transition)),
          gamma_(gamma) {}

    double gamma() const { return gamma_; }

    bool operator==(const Dmdp&) const = default;

private:
    double gamma_ = 0.0;
};

/// Undiscounted MDP over a fixed horizon H with time-homogeneous transitions.
class FiniteHorizonMdp : public TransitionModel {
public:
    FiniteHorizonMdp() = default;
    FiniteHorizonMdp(TransitionModel model, std::size_t horizon)
        : TransitionModel(std::move(model)), horizon_(horizon) {}

    std::size_t horizon() const { return horizon_; }

    bool operator==(const FiniteHorizonMdp&) const = default;

private:
    std::size_t horizon_ = 0;
};

/// One failed invariant. state/action are set when the violation is local to a row.
struct Violation {
    std::optional<std::size_t> state;
    std::optional<std::size_t> action;
    std::string message;
};

/// Row-sum tolerance used by every validation in the library.
inline constexpr double kStochasticTolerance = 1e-12;

std::vector<Violation> validate(const TransitionModel& model);
std::vector<Violation> validate(const Dmdp& mdp);
std::vector<Violation> validate(const FiniteHorizonMdp& mdp);

/// Throws std::invalid_argument listing every violation, if any.
void require_valid(const Dmdp& mdp);
void require_valid(const FiniteHorizonMdp& mdp);

struct RandomMdpSpec {
    std::size_t n_states = 1;
    std::size_t n_actions = 1;
    double gamma = 0.9;
    double concentration = 1.0;
    std::uint64_t seed = 0;
};

/// Rows from a symmetric Dirichlet(concentration), rewards uniform on [0,1].
Dmdp generate_random(const RandomMdpSpec& spec);

/// Two-action birth-death chain; reward 1 only at the last state.
Dmdp generate_chain(std::size_t n_states, double gamma, double slip);

/// Same transitions and rewards as `mdp`, discount dropped, horizon H.
FiniteHorizonMdp with_horizon(const TransitionModel& model, std::size_t horizon);

double max_norm(std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace vqvi
