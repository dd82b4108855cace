#include "stlsbb/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace stlsbb {

// ---------------------------------------------------------------------------
// Profiles

ProfileTable::ProfileTable(std::vector<std::string> solvers, std::vector<std::vector<double>> ratios)
    : solvers_(std::move(solvers)), ratios_(std::move(ratios))
{
}

double ProfileTable::rho(std::size_t solver, double theta) const
{
    if (solver >= solvers_.size())
        throw Error(Errc::invalid_parameter, "profile: solver index out of range");
    std::size_t hits = 0;
    for (const auto& row : ratios_)
        hits += std::isfinite(row[solver]) && row[solver] <= theta ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(ratios_.size());
}

std::vector<double> ProfileTable::breakpoints() const
{
    std::vector<double> out;
    for (const auto& row : ratios_)
        for (double r : row)
            if (std::isfinite(r))
                out.push_back(r);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ProfileTable performance_profile(const std::vector<std::vector<double>>& costs,
                                 std::vector<std::string> solver_names)
{
    if (costs.empty())
        throw Error(Errc::invalid_parameter, "profile: need at least one problem");
    const std::size_t solvers = costs.front().size();
    if (solvers < 2)
        throw Error(Errc::invalid_parameter, "profile: need at least two solvers");
    if (solver_names.empty())
        for (std::size_t s = 0; s < solvers; ++s)
            solver_names.push_back("solver" + std::to_string(s + 1));
    if (solver_names.size() != solvers)
        throw Error(Errc::dimension_mismatch, "profile: solver names do not match cost columns");

    auto ok = [](double c) { return std::isfinite(c) && c > 0.0; };
    std::vector<std::vector<double>> ratios;
    ratios.reserve(costs.size());
    for (std::size_t p = 0; p < costs.size(); ++p) {
        const auto& row = costs[p];
        if (row.size() != solvers)
            throw Error(Errc::dimension_mismatch, "profile: ragged cost matrix");
        double best = failed_cost;
        for (double c : row)
            if (ok(c))
                best = std::min(best, c);
        if (!std::isfinite(best))
            throw Error(Errc::all_failed_on_problem, "profile: every solver failed on problem " + std::to_string(p));
        std::vector<double> r(solvers);
        for (std::size_t s = 0; s < solvers; ++s)
            r[s] = ok(row[s]) ? row[s] / best : failed_cost;
        ratios.push_back(std::move(r));
    }
    return ProfileTable(std::move(solver_names), std::move(ratios));
}

void write_profile_csv(std::ostream& os, const ProfileTable& table)
{
    os << "# stlsbb-profile v1\n";
    os << "theta";
    for (const auto& s : table.solvers())
        os << ',' << s;
    os << '\n';
    auto row = [&](double theta) {
        os << format_g17(theta);
        for (std::size_t s = 0; s < table.solvers().size(); ++s)
            os << ',' << format_g17(table.rho(s, theta));
        os << '\n';
    };
    for (double theta : table.breakpoints())
        row(theta);
    row(failed_cost);
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(line);
    while (std::getline(ss, item, ','))
        out.push_back(item);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_cost(const std::string& field)
{
    if (field == "fail" || field == "--" || field == "inf" || field == "nan")
        return failed_cost;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw Error(Errc::parse_error, "costs: bad value '" + field + "'");
    return v;
}

} // namespace

CostMatrix read_costs_csv(std::istream& is)
{
    CostMatrix m;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        auto fields = split_csv(line);
        if (!header) {
            if (fields.size() < 3)
                throw Error(Errc::parse_error, "costs: header needs a problem column and >= 2 solvers");
            m.solvers.assign(fields.begin() + 1, fields.end());
            header = true;
            continue;
        }
        if (fields.size() != m.solvers.size() + 1)
            throw Error(Errc::parse_error, "costs: row has " + std::to_string(fields.size()) + " fields, expected " +
                                               std::to_string(m.solvers.size() + 1));
        m.problems.push_back(fields[0]);
        std::vector<double> row;
        for (std::size_t i = 1; i < fields.size(); ++i)
            row.push_back(parse_cost(fields[i]));
        m.costs.push_back(std::move(row));
    }
    if (!header || m.costs.empty())
        throw Error(Errc::parse_error, "costs: no data");
    return m;
}

void write_costs_csv(std::ostream& os, const CostMatrix& m)
{
    os << "problem";
    for (const auto& s : m.solvers)
        os << ',' << s;
    os << '\n';
    for (std::size_t p = 0; p < m.costs.size(); ++p) {
        os << m.problems[p];
        for (double c : m.costs[p])
            os << ',' << (std::isfinite(c) ? format_g17(c) : std::string("fail"));
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Sweeps

double median(std::vector<double> values)
{
    if (values.empty())
        return std::nan("");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void ExperimentGrid::validate() const
{
    if (settings.empty() || kappas.empty() || epsilons.empty() || seeds.empty() || policies.empty())
        throw Error(Errc::invalid_parameter, "grid: every axis needs at least one value");
    for (double e : epsilons)
        if (!(e > 0.0 && e < 1.0))
            throw Error(Errc::invalid_parameter, "grid: epsilon values must lie in (0, 1)");
    for (int s : settings)
        for (double k : kappas) {
            const SpectrumSetting setting(s, k);
            if (n < setting.min_dim())
                throw Error(Errc::dimension_too_small, "grid: n too small for setting " + std::to_string(s));
        }
    for (const auto& p : policies)
        (void)parse_policy(p);
    if (max_iter == 0)
        throw Error(Errc::invalid_parameter, "grid: max_iter must be >= 1");
}

namespace {

std::string stop_rule_name(double eps) { return "relative_gradient:" + format_g17(eps); }

const char* method_name(bool line_search) { return line_search ? "nonmonotone" : "plain"; }

} // namespace

SweepResult run_quadratic_sweep(const ExperimentGrid& grid)
{
    grid.validate();
    SweepResult result;
    result.grid = grid;

    const std::size_t ns = grid.settings.size(), nk = grid.kappas.size(), ne = grid.epsilons.size(),
                      nd = grid.seeds.size(), np = grid.policies.size();
    result.cells.resize(ns * nk * ne * nd * np);
    auto cell_index = [&](std::size_t s, std::size_t k, std::size_t e, std::size_t d, std::size_t p) {
        return (((s * nk + k) * ne + e) * nd + d) * np + p;
    };

    // One task per generated instance; each fills its (eps, policy) cells.
    const std::size_t tasks = ns * nk * nd;
    auto work = [&](std::size_t t) {
        const std::size_t d = t % nd;
        const std::size_t k = (t / nd) % nk;
        const std::size_t s = t / (nd * nk);
        const SpectrumSetting setting(grid.settings[s], grid.kappas[k]);
        const std::uint64_t seed = grid.seeds[d];

        std::optional<QuadraticInstance> inst;
        std::string gen_error;
        try {
            inst.emplace(generate_instance(grid.n, setting, seed));
        } catch (const Error& err) {
            gen_error = err.what();
        }
        for (std::size_t e = 0; e < ne; ++e)
            for (std::size_t p = 0; p < np; ++p) {
                SweepCell& cell = result.cells[cell_index(s, k, e, d, p)];
                cell.setting = setting.id();
                cell.kappa = setting.kappa();
                cell.epsilon = grid.epsilons[e];
                cell.seed = seed;
                cell.policy = grid.policies[p];
                if (!inst) {
                    cell.failed = true;
                    cell.error = gen_error;
                    continue;
                }
                try {
                    const Vector x0 = Vector::Ones(grid.n);
                    const double alpha0 = default_alpha0(*inst, x0);
                    const auto policy = parse_policy(grid.policies[p]);
                    RunTrace trace;
                    if (grid.line_search) {
                        SolverConfig config = experiment_config();
                        config.stop = {StopKind::relative_gradient, grid.epsilons[e], {}};
                        config.max_iter = grid.max_iter;
                        config.alpha0 = alpha0;
                        trace = run(as_objective(*inst), x0, config, policy);
                    } else {
                        trace = solve_bb(*inst, policy, grid.epsilons[e], grid.max_iter, x0, alpha0);
                    }
                    cell.iterations = trace.iterations();
                    cell.failed = !trace.converged();
                } catch (const Error& err) {
                    cell.failed = true;
                    cell.error = err.what();
                }
            }
    };

    unsigned threads = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < tasks; t = next++)
                    work(t);
            });
    }

    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t k = 0; k < nk; ++k)
            for (std::size_t e = 0; e < ne; ++e)
                for (std::size_t p = 0; p < np; ++p) {
                    SweepSummary sum;
                    std::vector<double> its;
                    for (std::size_t d = 0; d < nd; ++d) {
                        const auto& c = result.cells[cell_index(s, k, e, d, p)];
                        sum.setting = c.setting;
                        sum.kappa = c.kappa;
                        sum.epsilon = c.epsilon;
                        sum.policy = c.policy;
                        if (c.failed)
                            ++sum.failures;
                        if (c.error.empty())
                            its.push_back(static_cast<double>(c.iterations));
                    }
                    sum.runs = its.size();
                    double total = 0.0;
                    for (double v : its)
                        total += v;
                    sum.mean_iterations = its.empty() ? std::nan("") : total / static_cast<double>(its.size());
                    sum.median_iterations = median(its);
                    result.summary.push_back(sum);
                }
    return result;
}

CostMatrix SweepResult::costs() const
{
    CostMatrix m;
    m.solvers = grid.policies;
    const std::size_t np = grid.policies.size();
    for (std::size_t i = 0; i < cells.size(); i += np) {
        const auto& c = cells[i];
        m.problems.push_back("s" + std::to_string(c.setting) + "_k" + format_g17(c.kappa) + "_e" +
                             format_g17(c.epsilon) + "_seed" + std::to_string(c.seed));
        std::vector<double> row;
        for (std::size_t p = 0; p < np; ++p) {
            const auto& cp = cells[i + p];
            row.push_back(cp.failed ? failed_cost : static_cast<double>(std::max<std::size_t>(cp.iterations, 1)));
        }
        m.costs.push_back(std::move(row));
    }
    return m;
}

namespace {

std::string cell_status(const SweepCell& c)
{
    if (!c.error.empty()) {
        std::string msg = c.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        return "error:" + msg;
    }
    return c.failed ? "cap" : "ok";
}

} // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& r)
{
    os << "# stlsbb-sweep v1\n";
    os << "setting,kappa,epsilon,seed,policy,n,method,alpha0_rule,stop_rule,max_iter,iterations,status\n";
    for (const auto& c : r.cells) {
        os << c.setting << ',' << format_g17(c.kappa) << ',' << format_g17(c.epsilon) << ',' << c.seed << ','
           << c.policy << ',' << r.grid.n << ',' << method_name(r.grid.line_search) << ",inv_grad_inf,"
           << stop_rule_name(c.epsilon) << ',' << r.grid.max_iter << ',' << c.iterations << ','
           << cell_status(c) << '\n';
    }
}

void write_summary_csv(std::ostream& os, const SweepResult& r)
{
    os << "# stlsbb-summary v1\n";
    os << "setting,kappa,epsilon,policy,n,method,runs,failures,mean_iterations,median_iterations\n";
    for (const auto& s : r.summary) {
        os << s.setting << ',' << format_g17(s.kappa) << ',' << format_g17(s.epsilon) << ',' << s.policy << ','
           << r.grid.n << ',' << method_name(r.grid.line_search) << ',' << s.runs << ',' << s.failures << ','
           << format_g17(s.mean_iterations) << ',' << format_g17(s.median_iterations) << '\n';
    }
}

void write_sweep_json(std::ostream& os, const SweepResult& r)
{
    nlohmann::json j;
    j["format"] = "stlsbb-sweep v1";
    j["n"] = r.grid.n;
    j["method"] = method_name(r.grid.line_search);
    j["max_iter"] = r.grid.max_iter;
    j["alpha0_rule"] = "inv_grad_inf";
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const auto& c : r.cells)
        cells.push_back({{"setting", c.setting},
                         {"kappa", c.kappa},
                         {"epsilon", c.epsilon},
                         {"seed", c.seed},
                         {"policy", c.policy},
                         {"stop_rule", stop_rule_name(c.epsilon)},
                         {"iterations", c.iterations},
                         {"status", cell_status(c)}});
    auto& summary = j["summary"] = nlohmann::json::array();
    for (const auto& s : r.summary)
        summary.push_back({{"setting", s.setting},
                           {"kappa", s.kappa},
                           {"epsilon", s.epsilon},
                           {"policy", s.policy},
                           {"runs", s.runs},
                           {"failures", s.failures},
                           {"mean_iterations", s.mean_iterations},
                           {"median_iterations", s.median_iterations}});
    os << j.dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// Rosenbrock

SolverConfig experiment_config()
{
    SolverConfig c;
    c.memory = 10;
    c.beta = 0.1;
    c.eta = 0.001;
    c.delta = 0.1;
    c.sigma = 0.8;
    return c;
}

RosenbrockTable run_rosenbrock_table(std::vector<double> epsilons, std::vector<std::string> policies,
                                     std::size_t max_iter)
{
    RosenbrockTable table;
    table.epsilons = std::move(epsilons);
    table.policies = std::move(policies);
    const Objective f = rosenbrock2();
    for (double eps : table.epsilons) {
        std::vector<std::optional<std::size_t>> row;
        for (const auto& name : table.policies) {
            SolverConfig config = experiment_config();
            config.alpha0 = 1.0;
            config.max_iter = max_iter;
            config.stop = {StopKind::distance, eps, *f.minimizer};
            try {
                const RunTrace trace = run(f, f.standard_start, config, parse_policy(name));
                row.push_back(trace.converged() ? std::optional(trace.iterations()) : std::nullopt);
            } catch (const Error& err) {
                if (err.code() != Errc::line_search_stall)
                    throw;
                row.push_back(std::nullopt);
            }
        }
        table.counts.push_back(std::move(row));
    }
    return table;
}

void write_rosenbrock_table(std::ostream& os, const RosenbrockTable& t, bool csv)
{
    auto cell = [](const std::optional<std::size_t>& c) { return c ? std::to_string(*c) : std::string("--"); };
    if (csv) {
        os << "# stlsbb-rosenbrock v1\n";
        os << "epsilon";
        for (const auto& p : t.policies)
            os << ',' << p;
        os << '\n';
        for (std::size_t e = 0; e < t.epsilons.size(); ++e) {
            os << format_g17(t.epsilons[e]);
            for (const auto& c : t.counts[e])
                os << ',' << cell(c);
            os << '\n';
        }
        return;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-10s", "epsilon");
    os << buf;
    for (const auto& p : t.policies) {
        std::snprintf(buf, sizeof(buf), "%12s", p.c_str());
        os << buf;
    }
    os << '\n';
    for (std::size_t e = 0; e < t.epsilons.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%-10.0e", t.epsilons[e]);
        os << buf;
        for (const auto& c : t.counts[e]) {
            std::snprintf(buf, sizeof(buf), "%12s", cell(c).c_str());
            os << buf;
        }
        os << '\n';
    }
}

} // namespace stlsbb
