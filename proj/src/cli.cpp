#include "stlsbb/cli.hpp"

#include "stlsbb/gbb.hpp"
#include "stlsbb/harness.hpp"
#include "stlsbb/oracle.hpp"
#include "stlsbb/quadratic.hpp"
#include "stlsbb/stepcore.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace stlsbb {

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    std::string policy;
};

// Relative paths go under $STLSBB_OUT_DIR when it is set.
std::string resolve_output(const std::string& path)
{
    if (path.empty() || path == "-")
        return path;
    const char* dir = std::getenv("STLSBB_OUT_DIR");
    std::filesystem::path p(path);
    if (dir != nullptr && *dir != '\0' && p.is_relative())
        p = std::filesystem::path(dir) / p;
    return p.string();
}

/// Writes through `emit` to stdout or to a file.
void with_output(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& emit)
{
    const std::string resolved = resolve_output(path);
    if (resolved.empty() || resolved == "-") {
        emit(out);
        out.flush();
        return;
    }
    std::ofstream file(resolved);
    if (!file)
        throw Error(Errc::invalid_parameter, "cannot open '" + resolved + "' for writing");
    emit(file);
    file.flush();
    if (!file)
        throw Error(Errc::invalid_parameter, "failed writing '" + resolved + "'");
}

Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---------------------------------------------------------------------------

struct StepsOptions {
    std::vector<double> s, y;
    std::optional<double> gamma, tau, prev_alpha;
    std::size_t k = 0;
    bool verify = false;
};

struct StepRow {
    std::string quantity;
    double value;
    std::optional<double> oracle;
};

int cmd_steps(const Globals& g, const StepsOptions& o, std::ostream& out)
{
    const StepPair pair(to_vector(o.s), to_vector(o.y));
    std::vector<StepRow> rows;

    auto oracle_for = [&](const PolicyKind& kind) -> std::optional<double> {
        if (!o.verify)
            return std::nullopt;
        struct V {
            const StepPair& pair;
            std::optional<double> operator()(const policy::Bb1&) const { return oracle::ls_inverse_step_minimizer(pair); }
            std::optional<double> operator()(const policy::Bb2&) const { return oracle::ls_step_minimizer(pair); }
            std::optional<double> operator()(const policy::FamilyGamma& k) const
            {
                return oracle::stls_minimizer(pair, k.gamma);
            }
            std::optional<double> operator()(const policy::FamilyGammaPrime& k) const
            {
                return oracle::stls_prime_minimizer(pair, k.gamma);
            }
            std::optional<double> operator()(const policy::ConvexTau& k) const
            {
                const double t = k.tau.value();
                return t * oracle::ls_inverse_step_minimizer(pair) + (1.0 - t) * oracle::ls_step_minimizer(pair);
            }
            std::optional<double> operator()(const policy::Atc&) const { return std::nullopt; }
        };
        return std::visit(V{pair}, kind);
    };

    if (!g.policy.empty()) {
        SteplengthPolicy policy = parse_policy(g.policy);
        policy.iteration_index = o.k;
        policy.prev_alpha = o.prev_alpha;
        const double alpha = next_steplength(policy, pair).first;
        rows.push_back({policy_name(policy.kind), alpha, oracle_for(policy.kind)});
    } else {
        rows.push_back({"bb1", bb1(pair), oracle_for(policy::Bb1{})});
        rows.push_back({"bb2", bb2(pair), oracle_for(policy::Bb2{})});
        rows.push_back({"tls", alpha_tls(pair),
                        o.verify ? std::optional(oracle::homogeneous_residual_min(pair)) : std::nullopt});
        if (o.gamma) {
            const FamilyParameter p(*o.gamma);
            rows.push_back({"gamma:" + format_g17(*o.gamma), alpha_family(pair, p),
                            oracle_for(policy::FamilyGamma{p})});
            rows.push_back({"gammaPrime:" + format_g17(*o.gamma), alpha_family_prime(pair, p),
                            oracle_for(policy::FamilyGammaPrime{p})});
            rows.push_back({"tau_from_gamma:" + format_g17(*o.gamma), tau_from_gamma(pair, p).value(), std::nullopt});
        }
        if (o.tau) {
            const ConvexWeight w(*o.tau);
            rows.push_back({"tau:" + format_g17(*o.tau), alpha_convex(pair, w), oracle_for(policy::ConvexTau{w})});
        }
    }

    bool all_agree = true;
    auto agrees = [](const StepRow& r) { return std::abs(r.value - *r.oracle) <= 1e-6 * std::max(1.0, std::abs(r.value)); };
    for (const auto& r : rows)
        if (r.oracle && !agrees(r))
            all_agree = false;

    with_output(g.out, out, [&](std::ostream& os) {
        if (g.format == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : rows) {
                nlohmann::json e{{"quantity", r.quantity}, {"value", r.value}};
                if (r.oracle) {
                    e["oracle"] = *r.oracle;
                    e["abs_diff"] = std::abs(r.value - *r.oracle);
                    e["agree"] = agrees(r);
                }
                j.push_back(e);
            }
            os << j.dump(1) << '\n';
            return;
        }
        os << (o.verify ? "quantity,value,oracle,abs_diff,agree\n" : "quantity,value\n");
        for (const auto& r : rows) {
            os << r.quantity << ',' << format_g17(r.value);
            if (o.verify) {
                if (r.oracle)
                    os << ',' << format_g17(*r.oracle) << ',' << format_g17(std::abs(r.value - *r.oracle)) << ','
                       << (agrees(r) ? "yes" : "no");
                else
                    os << ",,,n/a";
            }
            os << '\n';
        }
    });
    return all_agree ? 0 : 2;
}

// ---------------------------------------------------------------------------

struct QuadOptions {
    Eigen::Index n = 100;
    int setting = 1;
    double kappa = 1e4;
    double eps = 1e-6;
    std::size_t max_iter = 20000;
    std::string instance;
    std::string save_instance;
    bool line_search = false;
    std::optional<double> alpha0;
};

int cmd_quad(const Globals& g, const QuadOptions& o, std::ostream& out)
{
    QuadraticInstance inst = [&] {
        if (!o.instance.empty()) {
            std::ifstream in(o.instance);
            if (!in)
                throw Error(Errc::parse_error, "cannot open instance '" + o.instance + "'");
            return read_instance(in);
        }
        return generate_instance(o.n, SpectrumSetting(o.setting, o.kappa), g.seed);
    }();
    if (!o.save_instance.empty())
        with_output(o.save_instance, out, [&](std::ostream& os) { write_instance(os, inst); });

    const SteplengthPolicy policy = parse_policy(g.policy.empty() ? "gamma:1" : g.policy);
    const Vector x0 = Vector::Ones(inst.dim());
    const double alpha0 = o.alpha0 ? *o.alpha0 : default_alpha0(inst, x0);
    RunTrace trace;
    if (o.line_search) {
        SolverConfig config = experiment_config();
        config.stop = {StopKind::relative_gradient, o.eps, {}};
        config.max_iter = o.max_iter;
        config.alpha0 = alpha0;
        trace = run(as_objective(inst), x0, config, policy);
    } else {
        trace = solve_bb(inst, policy, o.eps, o.max_iter, x0, alpha0);
    }
    trace.alpha0_rule = o.alpha0 ? "fixed" : "inv_grad_inf";

    with_output(g.out, out, [&](std::ostream& os) {
        if (g.format == "json")
            write_trace_json(os, trace);
        else
            write_trace_csv(os, trace);
    });
    return 0;
}

// ---------------------------------------------------------------------------

struct RosenbrockOptions {
    std::vector<double> eps{1e-1, 1e-2, 1e-4, 1e-8};
    std::vector<std::string> policies;
    std::size_t max_iter = 5000;
    std::string trace_out;
};

int cmd_rosenbrock(const Globals& g, const RosenbrockOptions& o, std::ostream& out)
{
    std::vector<std::string> policies = o.policies;
    if (policies.empty())
        policies = g.policy.empty() ? std::vector<std::string>{"bb1", "bb2", "gamma:1", "gamma:1.5"}
                                    : std::vector<std::string>{g.policy};
    for (const auto& p : policies)
        (void)parse_policy(p);
    const RosenbrockTable table = run_rosenbrock_table(o.eps, policies, o.max_iter);

    with_output(g.out, out, [&](std::ostream& os) {
        if (g.format == "json") {
            nlohmann::json j;
            j["format"] = "stlsbb-rosenbrock v1";
            j["policies"] = table.policies;
            j["epsilons"] = table.epsilons;
            auto& rows = j["counts"] = nlohmann::json::array();
            for (const auto& r : table.counts) {
                nlohmann::json row = nlohmann::json::array();
                for (const auto& c : r)
                    row.push_back(c ? nlohmann::json(*c) : nlohmann::json(nullptr));
                rows.push_back(row);
            }
            os << j.dump(1) << '\n';
        } else {
            write_rosenbrock_table(os, table, g.format == "csv");
        }
    });

    if (!o.trace_out.empty()) {
        // Full trace of the first policy at the tightest tolerance.
        const Objective f = rosenbrock2();
        SolverConfig config = experiment_config();
        config.alpha0 = 1.0;
        config.max_iter = o.max_iter;
        config.stop = {StopKind::distance, *std::min_element(o.eps.begin(), o.eps.end()), *f.minimizer};
        const RunTrace trace = run(f, f.standard_start, config, parse_policy(policies.front()));
        with_output(o.trace_out, out, [&](std::ostream& os) { write_trace_csv(os, trace); });
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchOptions {
    Eigen::Index n = 100;
    std::vector<int> settings{1};
    std::vector<double> kappas{1e4};
    std::vector<double> eps{1e-6};
    std::size_t seeds = 10;
    std::vector<std::string> policies;
    std::size_t max_iter = 20000;
    unsigned threads = 0;
    bool line_search = false;
    std::string summary;
    std::string costs;
};

int cmd_bench(const Globals& g, const BenchOptions& o, std::ostream& out)
{
    ExperimentGrid grid;
    grid.n = o.n;
    grid.settings = o.settings;
    grid.kappas = o.kappas;
    grid.epsilons = o.eps;
    for (std::size_t i = 0; i < o.seeds; ++i)
        grid.seeds.push_back(g.seed + i);
    if (!o.policies.empty())
        grid.policies = o.policies;
    else if (!g.policy.empty())
        grid.policies = {g.policy};
    grid.max_iter = o.max_iter;
    grid.threads = o.threads;
    grid.line_search = o.line_search;

    const SweepResult result = run_quadratic_sweep(grid);
    with_output(g.out, out, [&](std::ostream& os) {
        if (g.format == "json")
            write_sweep_json(os, result);
        else
            write_sweep_csv(os, result);
    });
    if (!o.summary.empty())
        with_output(o.summary, out, [&](std::ostream& os) { write_summary_csv(os, result); });
    if (!o.costs.empty())
        with_output(o.costs, out, [&](std::ostream& os) { write_costs_csv(os, result.costs()); });

    for (const auto& c : result.cells)
        if (!c.error.empty())
            return 2;
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_profile(const Globals& g, const std::string& in_path, std::ostream& out)
{
    std::ifstream in(in_path);
    if (!in)
        throw Error(Errc::parse_error, "cannot open cost file '" + in_path + "'");
    const CostMatrix costs = read_costs_csv(in);
    const ProfileTable table = performance_profile(costs.costs, costs.solvers);
    with_output(g.out, out, [&](std::ostream& os) {
        if (g.format == "json") {
            nlohmann::json j;
            j["format"] = "stlsbb-profile v1";
            j["solvers"] = table.solvers();
            auto& pts = j["points"] = nlohmann::json::array();
            for (double theta : table.breakpoints()) {
                std::vector<double> rho;
                for (std::size_t s = 0; s < table.solvers().size(); ++s)
                    rho.push_back(table.rho(s, theta));
                pts.push_back({{"theta", theta}, {"rho", rho}});
            }
            std::vector<double> solved;
            for (std::size_t s = 0; s < table.solvers().size(); ++s)
                solved.push_back(table.rho(s, failed_cost));
            j["solve_fraction"] = solved;
            os << j.dump(1) << '\n';
        } else {
            write_profile_csv(os, table);
        }
    });
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_audit(const Globals& g, const std::string& in_path, const SolverConfig& config, std::ostream& out)
{
    std::ifstream in(in_path);
    if (!in)
        throw Error(Errc::parse_error, "cannot open trace '" + in_path + "'");
    const RunTrace trace = read_trace_csv(in);
    const auto issues = audit_trace(trace, config);
    with_output(g.out, out, [&](std::ostream& os) {
        os << "steps " << (trace.rows.size() - 1) << ", violations " << issues.size() << '\n';
        for (const auto& i : issues)
            os << i << '\n';
    });
    return issues.empty() ? 0 : 2;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Barzilai-Borwein steplength family: formulas, solvers and benchmarks", "stlsbb"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Base random seed");
    app.add_option("--out", g.out, "Output file (default stdout)");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
    app.add_option("--policy", g.policy, "bb1 | bb2 | gamma:<v> | gammaPrime:<v> | tau:<v> | atc:<m>");

    StepsOptions so;
    auto* steps = app.add_subcommand("steps", "Evaluate steplength formulas on a secant pair");
    steps->add_option("--s", so.s, "Iterate difference, comma separated")->required()->delimiter(',');
    steps->add_option("--y", so.y, "Gradient difference, comma separated")->required()->delimiter(',');
    steps->add_option("--gamma", so.gamma, "STLS scale");
    steps->add_option("--tau", so.tau, "Convex weight");
    steps->add_option("--k", so.k, "Iteration index (ATC)");
    steps->add_option("--prev-alpha", so.prev_alpha, "Previous steplength (ATC)");
    steps->add_flag("--verify", so.verify, "Cross-check against the brute-force oracle");

    QuadOptions qo;
    auto* quad = app.add_subcommand("quad", "Single run on a random structured quadratic");
    quad->add_option("--n", qo.n, "Dimension");
    quad->add_option("--setting", qo.setting, "Spectrum setting 1..7");
    quad->add_option("--kappa", qo.kappa, "Condition number");
    quad->add_option("--eps", qo.eps, "Relative gradient tolerance");
    quad->add_option("--max-iter", qo.max_iter, "Iteration cap");
    quad->add_option("--instance", qo.instance, "Load a saved instance instead of generating");
    quad->add_option("--save-instance", qo.save_instance, "Write the instance used");
    quad->add_flag("--line-search", qo.line_search, "Use the nonmonotone line-search solver");
    quad->add_option("--alpha0", qo.alpha0, "First steplength (default 1/||g0||_inf)");

    RosenbrockOptions ro;
    auto* rosen = app.add_subcommand("rosenbrock", "Iteration counts on the planar Rosenbrock function");
    rosen->add_option("--eps", ro.eps, "Distance tolerances")->delimiter(',');
    rosen->add_option("--policies", ro.policies, "Policies (columns)")->delimiter(',');
    rosen->add_option("--max-iter", ro.max_iter, "Iteration cap");
    rosen->add_option("--trace", ro.trace_out, "Also write the full trace of the first policy");

    BenchOptions bo;
    auto* bench = app.add_subcommand("bench", "Quadratic sweep over settings, kappas, tolerances and seeds");
    bench->add_option("--n", bo.n, "Dimension");
    bench->add_option("--settings", bo.settings, "Spectrum settings")->delimiter(',');
    bench->add_option("--kappas", bo.kappas, "Condition numbers")->delimiter(',');
    bench->add_option("--eps", bo.eps, "Relative gradient tolerances")->delimiter(',');
    bench->add_option("--seeds", bo.seeds, "Number of seeds, starting at --seed");
    bench->add_option("--policies", bo.policies, "Policies")->delimiter(',');
    bench->add_option("--max-iter", bo.max_iter, "Iteration cap");
    bench->add_option("--threads", bo.threads, "Worker threads (0 = all cores)");
    bench->add_flag("--line-search", bo.line_search, "Use the nonmonotone line-search solver");
    bench->add_option("--summary", bo.summary, "Write per-cell averages here");
    bench->add_option("--costs", bo.costs, "Write the problem x policy cost matrix here");

    std::string profile_in;
    auto* profile = app.add_subcommand("profile", "Performance profile from a cost matrix CSV");
    profile->add_option("--in", profile_in, "Cost matrix (problem,<solver>...)")->required();

    std::string audit_in;
    SolverConfig audit_config = experiment_config();
    auto* audit = app.add_subcommand("audit", "Replay a line-search trace and check every accepted step");
    audit->add_option("--in", audit_in, "Trace CSV")->required();
    audit->add_option("--memory", audit_config.memory, "Nonmonotone memory M");
    audit->add_option("--beta", audit_config.beta, "Sufficient decrease parameter");
    audit->add_option("--eta", audit_config.eta, "Safeguard band parameter");
    audit->add_option("--delta", audit_config.delta, "Safeguard reset value");
    audit->add_option("--sigma", audit_config.sigma, "Backtracking factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "stlsbb: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*steps)
            return cmd_steps(g, so, out);
        if (*quad)
            return cmd_quad(g, qo, out);
        if (*rosen)
            return cmd_rosenbrock(g, ro, out);
        if (*bench)
            return cmd_bench(g, bo, out);
        if (*profile)
            return cmd_profile(g, profile_in, out);
        if (*audit)
            return cmd_audit(g, audit_in, audit_config, out);
    } catch (const Error& e) {
        err << "stlsbb: " << to_string(e.code()) << ": " << e.what() << '\n';
        switch (e.code()) {
        case Errc::parse_error:
        case Errc::invalid_parameter:
        case Errc::invalid_setting:
        case Errc::dimension_mismatch:
        case Errc::dimension_too_small:
            return 1;
        default:
            return 2;
        }
    } catch (const std::exception& e) {
        err << "stlsbb: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace stlsbb
