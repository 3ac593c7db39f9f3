#include "vqvi/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace vqvi {

TransitionModel::TransitionModel(std::size_t n_states, std::size_t n_actions,
                                 std::vector<double> reward, std::vector<double> transition)
    : n_states_(n_states),
      n_actions_(n_actions),
      reward_(std::move(reward)),
      transition_(std::move(transition)) {
    if (n_states_ == 0 || n_actions_ == 0)
        throw std::invalid_argument("model needs at least one state and one action");
    if (reward_.size() != n_states_ * n_actions_)
        throw std::invalid_argument("reward table has " + std::to_string(reward_.size()) +
                                    " entries, expected " +
                                    std::to_string(n_states_ * n_actions_));
    if (transition_.size() != n_states_ * n_actions_ * n_states_)
        throw std::invalid_argument("transition tensor has " +
                                    std::to_string(transition_.size()) + " entries, expected " +
                                    std::to_string(n_states_ * n_actions_ * n_states_));
}

double TransitionModel::expect(std::size_t s, std::size_t a, std::span<const double> v) const {
    const auto p = row(s, a);
    double acc = 0.0;
    for (std::size_t t = 0; t < n_states_; ++t) acc += p[t] * v[t];
    return acc;
}

namespace {

std::string pair_name(std::size_t s, std::size_t a) {
    return "(" + std::to_string(s) + "," + std::to_string(a) + ")";
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(15);
    os << x;
    return os.str();
}

}  // namespace

std::vector<Violation> validate(const TransitionModel& model) {
    std::vector<Violation> out;
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            const auto p = model.row(s, a);
            double sum = 0.0;
            bool finite = true;
            for (std::size_t t = 0; t < p.size(); ++t) {
                if (!std::isfinite(p[t])) {
                    finite = false;
                } else if (p[t] < 0.0) {
                    out.push_back({s, a,
                                   "row " + pair_name(s, a) + " has negative probability " +
                                       fmt(p[t]) + " at state " + std::to_string(t)});
                }
                sum += p[t];
            }
            if (!finite)
                out.push_back({s, a, "row " + pair_name(s, a) + " contains a non-finite entry"});
            else if (std::abs(sum - 1.0) > kStochasticTolerance)
                out.push_back({s, a, "row " + pair_name(s, a) + " sums to " + fmt(sum)});

            const double r = model.reward(s, a);
            if (!(r >= 0.0 && r <= 1.0))
                out.push_back({s, a, "reward " + pair_name(s, a) + " outside [0,1]"});
        }
    }
    return out;
}

std::vector<Violation> validate(const Dmdp& mdp) {
    auto out = validate(static_cast<const TransitionModel&>(mdp));
    if (!(mdp.gamma() > 0.0 && mdp.gamma() < 1.0))
        out.push_back({std::nullopt, std::nullopt, "gamma " + fmt(mdp.gamma()) + " outside (0,1)"});
    return out;
}

std::vector<Violation> validate(const FiniteHorizonMdp& mdp) {
    auto out = validate(static_cast<const TransitionModel&>(mdp));
    if (mdp.horizon() < 1) out.push_back({std::nullopt, std::nullopt, "horizon must be >= 1"});
    return out;
}

namespace {

template <class M>
void require_valid_impl(const M& mdp) {
    const auto violations = validate(mdp);
    if (violations.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += "\n  " + v.message;
    throw std::invalid_argument(msg);
}

}  // namespace

void require_valid(const Dmdp& mdp) { require_valid_impl(mdp); }
void require_valid(const FiniteHorizonMdp& mdp) { require_valid_impl(mdp); }

Dmdp generate_random(const RandomMdpSpec& spec) {
    if (spec.n_states == 0 || spec.n_actions == 0)
        throw std::invalid_argument("n_states and n_actions must be positive");
    if (!(spec.gamma > 0.0 && spec.gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    if (!(spec.concentration > 0.0) || !std::isfinite(spec.concentration))
        throw std::invalid_argument("concentration must be positive");

    const std::size_t n = spec.n_states;
    const std::size_t pairs = n * spec.n_actions;
    std::mt19937_64 rng(spec.seed);
    std::gamma_distribution<double> gamma_draw(spec.concentration, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> transition(pairs * n);
    for (std::size_t k = 0; k < pairs; ++k) {
        double* row = transition.data() + k * n;
        if (n == 1) {
            row[0] = 1.0;
            continue;
        }
        double sum = 0.0;
        // All-zero draws only happen when every gamma variate underflows.
        while (!(sum > 0.0)) {
            sum = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                row[t] = gamma_draw(rng);
                sum += row[t];
            }
        }
        for (std::size_t t = 0; t < n; ++t) row[t] /= sum;
        // Second pass absorbs the rounding left by the first division.
        double resum = 0.0;
        for (std::size_t t = 0; t < n; ++t) resum += row[t];
        for (std::size_t t = 0; t < n; ++t) row[t] /= resum;
    }

    std::vector<double> reward(pairs);
    for (auto& r : reward) r = unit(rng);

    return Dmdp(n, spec.n_actions, spec.gamma, std::move(reward), std::move(transition));
}

Dmdp generate_chain(std::size_t n_states, double gamma, double slip) {
    if (n_states < 2) throw std::invalid_argument("chain needs at least two states");
    if (!(slip >= 0.0 && slip < 1.0)) throw std::invalid_argument("slip must lie in [0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");

    const std::size_t n = n_states;
    std::vector<double> transition(n * 2 * n, 0.0);
    std::vector<double> reward(n * 2, 0.0);
    auto at = [&](std::size_t s, std::size_t a, std::size_t t) -> double& {
        return transition[(s * 2 + a) * n + t];
    };
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t right = std::min(s + 1, n - 1);
        const std::size_t left = s == 0 ? 0 : s - 1;
        at(s, 0, right) += 1.0 - slip;
        at(s, 0, s) += slip;
        at(s, 1, left) += 1.0 - slip;
        at(s, 1, s) += slip;
    }
    reward[(n - 1) * 2 + 0] = 1.0;
    reward[(n - 1) * 2 + 1] = 1.0;
    return Dmdp(n, 2, gamma, std::move(reward), std::move(transition));
}

FiniteHorizonMdp with_horizon(const TransitionModel& model, std::size_t horizon) {
    return FiniteHorizonMdp(model, horizon);
}

double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace vqvi
