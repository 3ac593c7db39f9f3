#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "experiment.hpp"
#include "vqvi/exact.hpp"
#include "vqvi/finite_horizon.hpp"
#include "vqvi/mdp_io.hpp"
#include "vqvi/variance.hpp"
#include "vqvi/vrqvi.hpp"

namespace vqvi::cli {

namespace {

/// Bad arguments or unreadable input: exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

Dmdp load_mdp(const std::string& path) {
    try {
        return load(path);
    } catch (const MdpFormatError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

nlohmann::json load_document(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

template <class T>
std::vector<T> load_array(const std::string& path, const char* field) {
    const nlohmann::json doc = load_document(path);
    require(doc.is_object() && doc.contains(field) && doc[field].is_array(),
            path + ": missing array field '" + field + "'");
    try {
        return doc[field].get<std::vector<T>>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": field '" + field + "': " + e.what());
    }
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    require(static_cast<bool>(file), "cannot write " + path);
    file << text;
}

void check_gamma(double gamma) { require(gamma > 0.0 && gamma < 1.0, "--gamma must lie in (0,1)"); }
void check_delta(double delta) { require(delta > 0.0 && delta < 1.0, "--delta must lie in (0,1)"); }

// generate ---------------------------------------------------------------------------------

struct GenerateArgs {
    std::string kind = "random";
    std::size_t states = 0;
    std::size_t actions = 2;
    double gamma = 0.9;
    double concentration = 1.0;
    double slip = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

void add_instance_options(CLI::App* cmd, GenerateArgs& a) {
    cmd->add_option("--kind", a.kind, "random or chain")->check(CLI::IsMember({"random", "chain"}));
    cmd->add_option("--states", a.states, "Number of states");
    cmd->add_option("--actions", a.actions, "Number of actions (random only)");
    cmd->add_option("--gamma", a.gamma, "Discount factor in (0,1)");
    cmd->add_option("--concentration", a.concentration, "Dirichlet concentration (random only)");
    cmd->add_option("--slip", a.slip, "Probability of staying put (chain only)");
}

Dmdp make_instance(const GenerateArgs& a) {
    check_gamma(a.gamma);
    require(a.states >= 1, "--states must be positive");
    if (a.kind == "chain") {
        require(a.states >= 2, "a chain needs --states >= 2");
        require(a.slip >= 0.0 && a.slip < 1.0, "--slip must lie in [0,1)");
        return generate_chain(a.states, a.gamma, a.slip);
    }
    require(a.actions >= 1, "--actions must be positive");
    require(a.concentration > 0.0 && std::isfinite(a.concentration), "--concentration must be positive");
    return generate_random({a.states, a.actions, a.gamma, a.concentration, a.seed});
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    require(!a.out.empty(), "--out is required");
    const Dmdp mdp = make_instance(a);
    save(mdp, a.out);
    out << "wrote " << a.out << " (" << mdp.n_states() << " states, " << mdp.n_actions() << " actions, "
        << (validate(mdp).empty() ? "valid" : "INVALID") << ")\n";
    return kExitOk;
}

// solve / bench ----------------------------------------------------------------------------

struct RunArgs {
    std::string solver = "vqvi";
    std::optional<double> epsilon;
    double delta = 0.1;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    double c_sparse = 1.0;
    std::optional<std::uint64_t> m;
    std::optional<std::size_t> horizon;
    unsigned threads = 1;
    bool no_timing = false;
    std::string format = "json";
    std::string out;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
    cmd->add_option("--solver", a.solver, "vqvi, sparsified, fh-vqvi, exact-vi or exact-pi")
        ->check(CLI::IsMember({"vqvi", "sparsified", "fh-vqvi", "exact-vi", "exact-pi"}));
    cmd->add_option("--epsilon", a.epsilon, "Target accuracy");
    cmd->add_option("--delta", a.delta, "Failure probability");
    cmd->add_option("--kappa", a.kappa, "Multiplier on the per-pair sample counts");
    cmd->add_option("--tol", a.tol, "Value iteration tolerance for exact solves");
    cmd->add_option("--c-sparse", a.c_sparse, "Constant in the sparsified sample count");
    cmd->add_option("--m", a.m, "Samples per pair for the sparsified solver (overrides the schedule)");
    cmd->add_option("--horizon", a.horizon, "Horizon H for fh-vqvi");
    cmd->add_option("--threads", a.threads, "Worker threads");
    cmd->add_flag("--no-timing", a.no_timing, "Report wall_time_seconds as 0 for byte-identical output");
    cmd->add_option("--out,-o", a.out, "Output path (default stdout)");
}

RunSpec make_spec(const RunArgs& a, const Dmdp& mdp) {
    RunSpec spec;
    spec.solver = *parse_solver(a.solver);
    spec.mdp = mdp;
    spec.epsilon = a.epsilon;
    spec.delta = a.delta;
    spec.kappa = a.kappa;
    spec.seed = a.seed;
    spec.tol = a.tol;
    spec.c_sparse = a.c_sparse;
    spec.m = a.m;
    spec.timing = !a.no_timing;
    check_delta(a.delta);
    require(a.kappa > 0.0, "--kappa must be positive");
    require(a.tol > 0.0, "--tol must be positive");
    require(a.c_sparse > 0.0, "--c-sparse must be positive");
    require(!a.epsilon || *a.epsilon > 0.0, "--epsilon must be positive");
    require(!a.m || *a.m >= 1, "--m must be at least 1");
    switch (spec.solver) {
        case SolverKind::vqvi:
            require(a.epsilon.has_value(), "--epsilon is required for vqvi");
            break;
        case SolverKind::fh_vqvi:
            require(a.epsilon.has_value(), "--epsilon is required for fh-vqvi");
            require(a.horizon.has_value() && *a.horizon >= 1, "--horizon >= 1 is required for fh-vqvi");
            spec.horizon = *a.horizon;
            break;
        case SolverKind::sparsified:
            require(a.epsilon || a.m, "--epsilon or --m is required for sparsified");
            break;
        default:
            break;
    }
    return spec;
}

int cmd_solve(const RunArgs& a, const std::string& mdp_path, std::ostream& out) {
    const Dmdp mdp = load_mdp(mdp_path);
    RunSpec spec = make_spec(a, mdp);
    spec.threads = std::max(1u, a.threads);
    spec.run_id = std::string(solver_name(spec.solver)) + "-seed" + std::to_string(a.seed);
    const ExperimentReport report = run_experiment(spec);
    write_output(a.out, to_json(report).dump() + "\n", out);
    return report.success ? kExitOk : kExitFailure;
}

struct BenchArgs {
    RunArgs run;
    GenerateArgs instance;
    std::string mdp_path;
    std::string sweep;
    std::vector<double> values;
    std::size_t seeds = 1;
    std::uint64_t seed_base = 0;
    std::uint64_t mdp_seed = 0;
};

std::vector<RunSpec> bench_grid(const BenchArgs& b) {
    const bool from_file = !b.mdp_path.empty();
    require(from_file || b.instance.states > 0, "bench needs an MDP file or --kind/--states");
    std::optional<Dmdp> file_mdp;
    if (from_file) file_mdp = load_mdp(b.mdp_path);

    std::vector<double> values = b.values;
    if (b.sweep.empty()) {
        require(values.empty(), "--values needs --sweep");
        values.push_back(std::nan(""));
    } else {
        require(!values.empty(), "--sweep needs --values");
    }
    if ((b.sweep == "states" || b.sweep == "actions") && from_file)
        throw UsageError("--sweep " + b.sweep + " needs a generated instance, not a file");

    std::vector<RunSpec> grid;
    for (std::size_t p = 0; p < values.size(); ++p) {
        const double x = values[p];
        RunArgs run = b.run;
        GenerateArgs inst = b.instance;
        inst.seed = b.mdp_seed;
        std::optional<double> gamma_override;
        if (b.sweep == "epsilon") {
            run.epsilon = x;
        } else if (b.sweep == "gamma") {
            gamma_override = x;
            inst.gamma = x;
        } else if (b.sweep == "horizon") {
            require(x >= 1 && x == std::floor(x), "horizon values must be positive integers");
            run.horizon = static_cast<std::size_t>(x);
        } else if (b.sweep == "m") {
            require(x >= 1 && x == std::floor(x), "m values must be positive integers");
            run.m = static_cast<std::uint64_t>(x);
        } else if (b.sweep == "states") {
            require(x >= 1 && x == std::floor(x), "state counts must be positive integers");
            inst.states = static_cast<std::size_t>(x);
        } else if (b.sweep == "actions") {
            require(x >= 1 && x == std::floor(x), "action counts must be positive integers");
            inst.actions = static_cast<std::size_t>(x);
        }
        Dmdp mdp = from_file ? *file_mdp : make_instance(inst);
        if (gamma_override) {
            check_gamma(*gamma_override);
            mdp = Dmdp(static_cast<const TransitionModel&>(mdp), *gamma_override);
        }
        for (std::size_t k = 0; k < b.seeds; ++k) {
            RunArgs r = run;
            r.seed = b.seed_base + k;
            RunSpec spec = make_spec(r, mdp);
            spec.run_id = "p" + std::to_string(p) + "-s" + std::to_string(r.seed);
            grid.push_back(std::move(spec));
        }
    }
    return grid;
}

int cmd_bench(const BenchArgs& b, std::ostream& out) {
    const std::vector<RunSpec> grid = bench_grid(b);
    std::vector<ExperimentReport> reports(grid.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(b.run.threads, static_cast<unsigned>(grid.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) reports[i] = run_experiment(grid[i]);
    } else {
        std::mutex lock;
        std::size_t next = 0;
        std::exception_ptr error;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> g(lock);
                        if (next >= grid.size() || error) return;
                        i = next++;
                    }
                    try {
                        reports[i] = run_experiment(grid[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> g(lock);
                        error = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    std::string text;
    if (b.run.format == "csv") {
        text = csv_header() + "\n";
        for (const auto& r : reports) text += csv_row(r) + "\n";
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        text = arr.dump() + "\n";
    }
    write_output(b.run.out, text, out);
    return kExitOk;
}

// verify -----------------------------------------------------------------------------------

struct VerifyArgs {
    std::string mdp_path;
    std::string policy_path;
    std::string values_path;
    std::size_t random_policies = 20;
    std::size_t perturbations = 5;
    std::optional<std::size_t> horizon;
    std::uint64_t seed = 0;
};

struct CheckRow {
    std::string name;
    double lhs;
    double rhs;
    bool holds;
};

Policy random_policy(std::size_t n, std::size_t na, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, na - 1);
    Policy pi(n);
    for (auto& a : pi) a = pick(rng);
    return pi;
}

void policy_checks(const Dmdp& mdp, const Policy& pi, const std::string& tag, std::vector<CheckRow>& rows) {
    const double gamma = mdp.gamma();
    const BoundCheck bound = check_variance_bound(mdp, pi);
    rows.push_back({"variance_bound[" + tag + "]", bound.lhs, bound.rhs, bound.holds});

    const TotalVarianceTable sigma = total_variance(mdp, pi);
    const double residual = total_variance_residual(mdp, pi, sigma);
    rows.push_back({"variance_bellman_residual[" + tag + "]", residual, 1e-9, residual <= 1e-9});

    double largest = 0.0;
    for (double x : sigma.values()) largest = std::max(largest, x);
    const double cap = 1.0 / ((1.0 - gamma) * (1.0 - gamma));
    rows.push_back({"total_variance_cap[" + tag + "]", largest, cap, largest <= cap + kBoundTolerance});

    const std::size_t n = mdp.n_states();
    std::vector<double> p(n * n);
    for (std::size_t s = 0; s < n; ++s) {
        const auto row = mdp.row(s, pi[s]);
        std::copy(row.begin(), row.end(), p.begin() + static_cast<std::ptrdiff_t>(s * n));
    }
    const VarianceTable one_step = one_step_variance(mdp, policy_evaluation(mdp, pi));
    std::vector<double> v(n);
    for (std::size_t s = 0; s < n; ++s) v[s] = one_step(s, pi[s]);
    const BoundCheck sq = check_sqrt_inequality(p, v, gamma);
    rows.push_back({"sqrt_inequality[" + tag + "]", sq.lhs, sq.rhs, sq.holds});
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, const Terminal& term) {
    const Dmdp mdp = load_mdp(a.mdp_path);
    const std::size_t n = mdp.n_states();
    const std::size_t na = mdp.n_actions();
    std::optional<Policy> given_policy;
    if (!a.policy_path.empty()) {
        Policy pi = load_array<std::size_t>(a.policy_path, "policy");
        try {
            check_policy(mdp, pi);
        } catch (const std::invalid_argument& e) {
            throw UsageError(a.policy_path + ": " + e.what());
        }
        given_policy = std::move(pi);
    }
    std::optional<ValueVector> given_values;
    if (!a.values_path.empty()) {
        ValueVector v = load_array<double>(a.values_path, "values");
        require(v.size() == n, a.values_path + ": expected " + std::to_string(n) + " values");
        for (double x : v) require(std::isfinite(x), a.values_path + ": values must be finite");
        given_values = std::move(v);
    }

    std::vector<CheckRow> rows;
    std::mt19937_64 rng(a.seed);
    const PolicyIterationResult opt = policy_iteration(mdp);
    policy_checks(mdp, opt.pi, "optimal", rows);
    if (given_policy) policy_checks(mdp, *given_policy, "given", rows);
    for (std::size_t k = 0; k < a.random_policies; ++k)
        policy_checks(mdp, random_policy(n, na, rng), "random" + std::to_string(k), rows);

    // sqrt(sigma_v) <= sqrt(sigma_{v*}) + eps whenever ||v - v*|| <= eps.
    const VarianceTable base = one_step_variance(mdp, opt.v);
    const double beta = 1.0 / (1.0 - mdp.gamma());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t k = 0; k < a.perturbations; ++k) {
        const double eps = beta * std::ldexp(1.0, -static_cast<int>(k + 1));
        ValueVector v = opt.v;
        for (auto& x : v) x += eps * unit(rng);
        const VarianceTable sigma = one_step_variance(mdp, v);
        double worst = 0.0;
        for (std::size_t i = 0; i < sigma.values().size(); ++i)
            worst = std::max(worst, std::sqrt(sigma.values()[i]) - std::sqrt(base.values()[i]));
        rows.push_back({"variance_perturbation[" + std::to_string(k) + "]", worst, eps, worst <= eps + kBoundTolerance});
    }

    if (given_values) {
        const Policy pi = given_policy ? *given_policy : greedy_policy(mdp, *given_values);
        const MonotoneCheck mono = check_monotone_condition(mdp, *given_values, pi);
        rows.push_back({"monotone_condition", -mono.worst_slack, 1e-9, mono.holds});
    }

    if (a.horizon) {
        require(*a.horizon >= 1, "--horizon must be >= 1");
        const FiniteHorizonMdp fh = with_horizon(mdp, *a.horizon);
        const BackwardInductionResult best = fh_backward_induction(fh);
        const BoundCheck b = fh_variance_bound(fh, best.pi);
        rows.push_back({"fh_variance_bound[optimal]", b.lhs, b.rhs, b.holds});
        std::uniform_int_distribution<std::size_t> pick(0, na - 1);
        for (std::size_t k = 0; k < a.random_policies; ++k) {
            NonStationaryPolicy pi(n, *a.horizon);
            for (std::size_t h = 0; h < *a.horizon; ++h)
                for (std::size_t s = 0; s < n; ++s) pi(s, h) = pick(rng);
            const BoundCheck c = fh_variance_bound(fh, pi);
            rows.push_back({"fh_variance_bound[random" + std::to_string(k) + "]", c.lhs, c.rhs, c.holds});
        }
    }

    std::size_t width = 5;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    bool all = true;
    out << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(14) << "lhs"
        << std::setw(14) << "rhs" << "result\n";
    for (const auto& r : rows) {
        all = all && r.holds;
        std::ostringstream lhs;
        std::ostringstream rhs;
        lhs << std::setprecision(6) << r.lhs;
        rhs << std::setprecision(6) << r.rhs;
        const char* word = r.holds ? "PASS" : "FAIL";
        out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(14) << lhs.str()
            << std::setw(14) << rhs.str();
        if (term.color)
            out << (r.holds ? "\033[32m" : "\033[31m") << word << "\033[0m\n";
        else
            out << word << "\n";
    }
    out << (all ? "all checks hold\n" : "some checks failed\n");
    return all ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal term) {
    CLI::App app{"Sampling-based MDP solvers with exact verification"};
    app.name("vqvi");
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a random or chain MDP to a JSON file");
    add_instance_options(generate, gen);
    generate->add_option("--seed", gen.seed, "Generator seed");
    generate->add_option("--out,-o", gen.out, "Output path")->required();

    RunArgs solve_args;
    std::string solve_path;
    auto* solve_cmd = app.add_subcommand("solve", "Run one solver and print a JSON report");
    solve_cmd->add_option("mdp", solve_path, "MDP file")->required();
    add_run_options(solve_cmd, solve_args);
    solve_cmd->add_option("--seed", solve_args.seed, "Oracle seed");

    BenchArgs bench;
    bench.run.kappa = 0.01;
    bench.run.format = "csv";
    auto* bench_cmd = app.add_subcommand("bench", "Sweep a parameter over seeds and write CSV");
    bench_cmd->add_option("mdp", bench.mdp_path, "MDP file (or generate with --kind)");
    add_run_options(bench_cmd, bench.run);
    add_instance_options(bench_cmd, bench.instance);
    bench_cmd->add_option("--mdp-seed", bench.mdp_seed, "Generator seed for --kind instances");
    bench_cmd->add_option("--sweep", bench.sweep, "Swept parameter")
        ->check(CLI::IsMember({"epsilon", "gamma", "horizon", "m", "states", "actions"}));
    bench_cmd->add_option("--values", bench.values, "Grid values")->delimiter(',');
    bench_cmd->add_option("--seeds", bench.seeds, "Seeds per grid point");
    bench_cmd->add_option("--seed", bench.seed_base, "First oracle seed");
    bench_cmd->add_option("--format", bench.run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check the variance and monotonicity inequalities");
    verify_cmd->add_option("mdp", verify.mdp_path, "MDP file")->required();
    verify_cmd->add_option("--policy", verify.policy_path, "JSON file {\"policy\": [...]}");
    verify_cmd->add_option("--values", verify.values_path, "JSON file {\"values\": [...]}");
    verify_cmd->add_option("--random-policies", verify.random_policies, "Random policies to check");
    verify_cmd->add_option("--perturbations", verify.perturbations, "Perturbed value vectors to check");
    verify_cmd->add_option("--horizon", verify.horizon, "Also check the finite-horizon bound at this H");
    verify_cmd->add_option("--seed", verify.seed, "Seed for random policies");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            err << "run 'vqvi " << sub->get_name() << " --help' for usage\n";
        else
            err << "run 'vqvi --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (*generate) return cmd_generate(gen, out);
        if (*solve_cmd) return cmd_solve(solve_args, solve_path, out);
        if (*bench_cmd) return cmd_bench(bench, out);
        if (*verify_cmd) return cmd_verify(verify, out, term);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace vqvi::cli
