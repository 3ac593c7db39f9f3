#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "vqvi/exact.hpp"
#include "vqvi/sampling.hpp"
#include "vqvi/sparsified.hpp"

namespace vqvi::cli {

namespace {

struct SolverName {
    SolverKind kind;
    std::string_view name;
};

constexpr SolverName kSolvers[] = {
    {SolverKind::vqvi, "vqvi"},
    {SolverKind::sparsified, "sparsified"},
    {SolverKind::fh_vqvi, "fh-vqvi"},
    {SolverKind::exact_vi, "exact-vi"},
    {SolverKind::exact_pi, "exact-pi"},
};

double policy_gap(const Dmdp& mdp, const ValueVector& v_star, const Policy& pi) {
    return max_abs_diff(v_star, policy_evaluation(mdp, pi));
}

void fill_counts(ExperimentReport& report, const GenerativeOracle& oracle) {
    const SampleCount counts = oracle.sample_count();
    std::vector<std::uint64_t> sorted = counts.per_sa;
    std::sort(sorted.begin(), sorted.end());
    report.total_samples = counts.total;
    report.per_sa_min = sorted.front();
    report.per_sa_max = sorted.back();
    report.per_sa_median = sorted[(sorted.size() - 1) / 2];
}

std::string csv_optional(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

std::optional<SolverKind> parse_solver(std::string_view name) {
    for (const auto& s : kSolvers)
        if (s.name == name) return s.kind;
    return std::nullopt;
}

std::string_view solver_name(SolverKind kind) {
    for (const auto& s : kSolvers)
        if (s.kind == kind) return s.name;
    return "unknown";
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

ExperimentReport run_experiment(const RunSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    const Dmdp& mdp = spec.mdp;
    require_valid(mdp);

    ExperimentReport report;
    report.run_id = spec.run_id;
    report.solver = std::string(solver_name(spec.solver));
    report.states = mdp.n_states();
    report.actions = mdp.n_actions();
    report.epsilon = spec.epsilon;
    report.delta = spec.delta;
    report.kappa = spec.kappa;
    report.seed = spec.seed;

    if (spec.solver == SolverKind::fh_vqvi) {
        if (!spec.epsilon) throw std::invalid_argument("fh-vqvi needs epsilon");
        const FiniteHorizonMdp fh = with_horizon(mdp, spec.horizon);
        report.horizon = spec.horizon;
        GenerativeOracle oracle = build_oracle(fh, spec.seed);
        FhConstants consts = spec.fh_constants;
        consts.kappa = spec.kappa;
        const FhSolveResult result =
            fh_solve(oracle, spec.horizon, *spec.epsilon, spec.delta, consts, {false, spec.threads});
        const BackwardInductionResult exact = fh_backward_induction(fh);
        const StageValues achieved = fh_policy_evaluation(fh, result.pi);
        for (std::size_t h = 0; h < spec.horizon; ++h)
            report.achieved_error = std::max(report.achieved_error, max_abs_diff(exact.values[h], achieved[h]));
        report.meta_iterations = result.report.meta_iterations;
        fill_counts(report, oracle);
        report.success = report.achieved_error <= *spec.epsilon;
    } else {
        report.gamma = mdp.gamma();
        const PolicyIterationResult exact = policy_iteration(mdp);
        GenerativeOracle oracle = build_oracle(mdp, spec.seed);
        switch (spec.solver) {
            case SolverKind::vqvi: {
                if (!spec.epsilon) throw std::invalid_argument("vqvi needs epsilon");
                VqviConstants consts = spec.constants;
                consts.kappa = spec.kappa;
                const SolveResult result = solve(oracle, *spec.epsilon, spec.delta, consts, {false, spec.threads});
                report.meta_iterations = result.report.meta_iterations;
                report.achieved_error = policy_gap(mdp, exact.v, result.pi);
                break;
            }
            case SolverKind::sparsified: {
                if (!spec.epsilon && !spec.m) throw std::invalid_argument("sparsified needs epsilon or m");
                const SparsifiedResult result =
                    spec.m ? solve_via_sparsified_m(oracle, *spec.m, spec.tol)
                           : solve_via_sparsified(oracle, *spec.epsilon, spec.delta, spec.c_sparse, spec.tol);
                report.m = result.m;
                report.meta_iterations = 1;
                report.achieved_error = max_abs_diff(result.v, exact.v);
                report.policy_error = policy_gap(mdp, exact.v, result.pi);
                break;
            }
            case SolverKind::exact_vi: {
                const ValueIterationResult vi = exact_value_iteration(mdp, spec.tol);
                report.achieved_error = policy_gap(mdp, exact.v, greedy_policy(mdp, vi.v));
                break;
            }
            case SolverKind::exact_pi:
                report.achieved_error = policy_gap(mdp, exact.v, exact.pi);
                break;
            case SolverKind::fh_vqvi:
                break;
        }
        fill_counts(report, oracle);
        const double threshold = spec.epsilon ? *spec.epsilon
                                 : (spec.solver == SolverKind::exact_vi || spec.solver == SolverKind::exact_pi)
                                     ? spec.tol
                                     : std::numeric_limits<double>::infinity();
        report.success = report.achieved_error <= threshold;
    }

    if (spec.timing)
        report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::ordered_json to_json(const ExperimentReport& r) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["solver"] = r.solver;
    j["states"] = r.states;
    j["actions"] = r.actions;
    j["gamma"] = r.gamma ? nlohmann::ordered_json(*r.gamma) : nlohmann::ordered_json(nullptr);
    j["H"] = r.horizon ? nlohmann::ordered_json(*r.horizon) : nlohmann::ordered_json(nullptr);
    j["epsilon"] = r.epsilon ? nlohmann::ordered_json(*r.epsilon) : nlohmann::ordered_json(nullptr);
    j["delta"] = r.delta;
    j["kappa"] = r.kappa;
    j["seed"] = r.seed;
    j["meta_iterations"] = r.meta_iterations;
    if (r.m) j["m"] = *r.m;
    j["total_samples"] = r.total_samples;
    j["per_sa_samples"] = {{"min", r.per_sa_min}, {"median", r.per_sa_median}, {"max", r.per_sa_max}};
    j["achieved_error"] = r.achieved_error;
    if (r.policy_error) j["policy_error"] = *r.policy_error;
    j["success"] = r.success;
    j["wall_time_seconds"] = r.wall_time_seconds;
    return j;
}

std::string csv_header() {
    return "run_id,solver,states,actions,gamma,H,epsilon,delta,kappa,seed,total_samples,achieved_error,"
           "success,wall_time_seconds";
}

std::string csv_row(const ExperimentReport& r) {
    std::string out;
    out += r.run_id + ',';
    out += r.solver + ',';
    out += std::to_string(r.states) + ',';
    out += std::to_string(r.actions) + ',';
    out += csv_optional(r.gamma) + ',';
    out += (r.horizon ? std::to_string(*r.horizon) : std::string()) + ',';
    out += csv_optional(r.epsilon) + ',';
    out += format_double(r.delta) + ',';
    out += format_double(r.kappa) + ',';
    out += std::to_string(r.seed) + ',';
    out += std::to_string(r.total_samples) + ',';
    out += format_double(r.achieved_error) + ',';
    out += (r.success ? "true" : "false");
    out += ',';
    out += format_double(r.wall_time_seconds);
    return out;
}

}  // namespace vqvi::cli
