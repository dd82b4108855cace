#include "stlsbb/gbb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stlsbb {

Evaluation Objective::operator()(const Vector& x) const
{
    if (x.size() != dim)
        throw Error(Errc::dimension_mismatch, name + ": expected dimension " + std::to_string(dim));
    return eval(x);
}

std::string StopRule::describe() const
{
    switch (kind) {
    case StopKind::absolute_gradient: return "absolute_gradient:" + format_g17(epsilon);
    case StopKind::relative_gradient: return "relative_gradient:" + format_g17(epsilon);
    case StopKind::distance: return "distance:" + format_g17(epsilon);
    }
    return "unknown";
}

void SolverConfig::validate() const
{
    auto fail = [](const char* what) { throw Error(Errc::invalid_parameter, what); };
    if (!(beta > 0.0 && beta < 1.0))
        fail("beta must lie in (0, 1)");
    if (!(eta > 0.0 && eta < 1.0))
        fail("eta must lie in (0, 1)");
    if (!(delta > 0.0) || !std::isfinite(delta))
        fail("delta must be positive");
    if (!(sigma1 > 0.0 && sigma1 <= sigma && sigma <= sigma2 && sigma2 < 1.0))
        fail("need 0 < sigma1 <= sigma <= sigma2 < 1");
    if (!(stop.epsilon > 0.0))
        fail("epsilon must be positive");
    if (alpha0 && (!(*alpha0 > 0.0) || !std::isfinite(*alpha0)))
        fail("alpha0 must be positive");
}

NonmonotoneWindow::NonmonotoneWindow(std::size_t memory) : capacity_(memory + 1)
{
    values_.reserve(capacity_);
}

void NonmonotoneWindow::push(double f)
{
    if (values_.size() < capacity_) {
        values_.push_back(f);
        return;
    }
    values_[head_] = f;
    head_ = (head_ + 1) % capacity_;
}

double NonmonotoneWindow::max() const
{
    if (values_.empty())
        throw Error(Errc::invalid_parameter, "nonmonotone window is empty");
    return *std::max_element(values_.begin(), values_.end());
}

bool nonmonotone_accept(double f_trial, const NonmonotoneWindow& window, double beta, double alpha,
                        double grad_sq)
{
    return f_trial <= window.max() - beta * alpha * grad_sq;
}

double safeguard(double alpha, double eta, double delta) noexcept
{
    if (!std::isfinite(alpha) || alpha <= eta || alpha >= 1.0 / eta)
        return delta;
    return alpha;
}

double backtrack(double alpha, double sigma) noexcept { return sigma * alpha; }

double initial_steplength(const Objective& objective, const Vector& x0)
{
    const auto [f0, g0] = objective(x0);
    const double ginf = g0.lpNorm<Eigen::Infinity>();
    if (ginf == 0.0)
        throw Error(Errc::zero_gradient, "x0 is already stationary");
    const double f_probe = objective(x0 - g0 / ginf).f;
    return f_probe < f0 ? 1.0 / ginf : 1.0 / (4.0 * ginf);
}

RunTrace run(const Objective& objective, const Vector& x0, const SolverConfig& config,
             SteplengthPolicy policy)
{
    config.validate();
    if (config.stop.kind == StopKind::distance && config.stop.target.size() != x0.size())
        throw Error(Errc::dimension_mismatch, "distance stop rule needs a target of the iterate's dimension");

    RunTrace trace;
    trace.policy = policy_name(policy.kind);
    trace.stop_rule = config.stop.describe();

    Vector x = x0;
    auto [f, g] = objective(x);
    const double g0 = g.norm();
    NonmonotoneWindow window(config.memory);
    window.push(f);

    double alpha = 0.0;
    if (config.alpha0) {
        alpha = *config.alpha0;
        trace.alpha0_rule = "fixed";
    } else if (g0 > 0.0) {
        alpha = initial_steplength(objective, x);
        trace.alpha0_rule = "gradient_probe";
    }
    trace.alpha0 = alpha;
    policy.iteration_index = 1;
    policy.prev_alpha = alpha;

    auto stop_reached = [&](double gn) -> std::optional<Termination> {
        if (gn == 0.0)
            return Termination::gradient_tolerance;
        switch (config.stop.kind) {
        case StopKind::absolute_gradient:
            if (gn < config.stop.epsilon)
                return Termination::gradient_tolerance;
            break;
        case StopKind::relative_gradient:
            if (gn <= config.stop.epsilon * g0)
                return Termination::gradient_tolerance;
            break;
        case StopKind::distance:
            if ((x - config.stop.target).norm() <= config.stop.epsilon)
                return Termination::distance_tolerance;
            break;
        }
        return std::nullopt;
    };

    for (std::size_t k = 0;; ++k) {
        const double gn = g.norm();
        const double grad_sq = gn * gn;
        if (auto reason = stop_reached(gn)) {
            trace.rows.push_back({k, f, gn, 0.0, 0.0, 0, 0});
            trace.termination = *reason;
            break;
        }
        if (k == config.max_iter) {
            trace.rows.push_back({k, f, gn, 0.0, 0.0, 0, 0});
            trace.termination = Termination::iteration_cap;
            break;
        }

        const double guarded = safeguard(alpha, config.eta, config.delta);
        double trial = guarded;
        std::size_t backtracks = 0;
        Vector x_trial = x - trial * g;
        Evaluation e = objective(x_trial);
        while (!nonmonotone_accept(e.f, window, config.beta, trial, grad_sq)) {
            if (backtracks == config.max_backtracks)
                throw Error(Errc::line_search_stall,
                            "line search did not find an acceptable step after " +
                                std::to_string(backtracks) + " backtracks at iteration " + std::to_string(k));
            trial = backtrack(trial, config.sigma);
            ++backtracks;
            x_trial = x - trial * g;
            e = objective(x_trial);
        }
        trace.rows.push_back({k, f, gn, trial, guarded, backtracks, backtracks + 1});

        StepPair pair(x_trial - x, e.g - g);
        x = std::move(x_trial);
        f = e.f;
        g = std::move(e.g);
        window.push(f);

        policy.prev_alpha = trial;
        try {
            std::tie(alpha, policy) = next_steplength(policy, pair);
        } catch (const Error& err) {
            if (err.code() != Errc::nonpositive_curvature)
                throw;
            // Out of band on purpose: the safeguard replaces it with delta.
            alpha = std::numeric_limits<double>::infinity();
            ++policy.iteration_index;
        }
    }
    trace.final_x = std::move(x);
    return trace;
}

std::vector<std::string> audit_trace(const RunTrace& trace, const SolverConfig& config)
{
    std::vector<std::string> issues;
    auto report = [&](std::size_t k, const std::string& what) {
        issues.push_back("k=" + std::to_string(k) + ": " + what);
    };
    const auto& rows = trace.rows;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.k != i)
            report(r.k, "iteration index out of sequence");

        const double a = r.safeguarded_alpha;
        const bool in_band = std::isfinite(a) && a > config.eta && a < 1.0 / config.eta;
        if (!in_band && a != config.delta)
            report(r.k, "safeguarded steplength " + format_g17(a) + " outside (eta, 1/eta) and not delta");

        double replay = a;
        for (std::size_t b = 0; b < r.backtracks; ++b)
            replay = backtrack(replay, config.sigma);
        if (replay != r.alpha)
            report(r.k, "accepted steplength does not match safeguarded * sigma^backtracks");
        if (r.fevals != r.backtracks + 1)
            report(r.k, "function evaluations != 1 + backtracks");

        double window_max = -std::numeric_limits<double>::infinity();
        const std::size_t depth = std::min(i, config.memory);
        for (std::size_t j = 0; j <= depth; ++j)
            window_max = std::max(window_max, rows[i - j].f);
        const double threshold = window_max - config.beta * r.alpha * (r.grad_norm * r.grad_norm);
        if (!(rows[i + 1].f <= threshold))
            report(r.k, "nonmonotone condition violated: f_{k+1}=" + format_g17(rows[i + 1].f) +
                            " > " + format_g17(threshold));
    }
    if (!rows.empty()) {
        const auto& last = rows.back();
        const bool grad_stop = trace.termination == Termination::gradient_tolerance;
        if (grad_stop && trace.stop_rule.rfind("relative_gradient:", 0) == 0) {
            const double eps = std::stod(trace.stop_rule.substr(18));
            if (!(last.grad_norm <= eps * rows.front().grad_norm) && last.grad_norm != 0.0)
                report(last.k, "terminated on gradient tolerance but ||g|| is above it");
        }
    }
    return issues;
}

Objective rosenbrock2()
{
    Objective obj;
    obj.name = "rosenbrock2";
    obj.dim = 2;
    obj.eval = [](const Vector& x) {
        const double t = x[1] - x[0] * x[0];
        const double u = 1.0 - x[0];
        Vector g(2);
        g[0] = -400.0 * x[0] * t - 2.0 * u;
        g[1] = 200.0 * t;
        return Evaluation{100.0 * t * t + u * u, std::move(g)};
    };
    obj.standard_start = Vector{{-1.2, 1.0}};
    obj.minimizer = Vector::Ones(2);
    return obj;
}

Objective sphere(Eigen::Index dim)
{
    Objective obj;
    obj.name = "sphere";
    obj.dim = dim;
    obj.eval = [](const Vector& x) { return Evaluation{0.5 * x.squaredNorm(), x}; };
    obj.standard_start = Vector::Ones(dim);
    obj.minimizer = Vector::Zero(dim);
    return obj;
}

Objective extended_rosenbrock(Eigen::Index dim)
{
    if (dim < 2 || dim % 2 != 0)
        throw Error(Errc::invalid_parameter, "extended Rosenbrock needs an even dimension");
    Objective obj;
    obj.name = "extended-rosenbrock";
    obj.dim = dim;
    obj.eval = [](const Vector& x) {
        double f = 0.0;
        Vector g = Vector::Zero(x.size());
        for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
            const double t = x[i + 1] - x[i] * x[i];
            const double u = 1.0 - x[i];
            f += 100.0 * t * t + u * u;
            g[i] = -400.0 * x[i] * t - 2.0 * u;
            g[i + 1] = 200.0 * t;
        }
        return Evaluation{f, std::move(g)};
    };
    obj.standard_start.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        obj.standard_start[i] = i % 2 == 0 ? -1.2 : 1.0;
    obj.minimizer = Vector::Ones(dim);
    return obj;
}

Objective as_objective(const QuadraticInstance& inst)
{
    Objective obj;
    obj.name = "quadratic";
    obj.dim = inst.dim();
    obj.eval = [inst](const Vector& x) {
        Vector ax = apply_hessian(inst, x);
        const double f = 0.5 * x.dot(ax) - inst.linear().dot(x);
        return Evaluation{f, ax - inst.linear()};
    };
    obj.standard_start = Vector::Ones(inst.dim());
    return obj;
}

void ObjectiveRegistry::add(const std::string& name, Factory factory)
{
    factories_[name] = std::move(factory);
}

Objective ObjectiveRegistry::make(const std::string& name, Eigen::Index dim) const
{
    const auto it = factories_.find(name);
    if (it == factories_.end())
        throw Error(Errc::invalid_parameter, "unknown objective '" + name + "'");
    return it->second(dim);
}

std::vector<std::string> ObjectiveRegistry::names() const
{
    std::vector<std::string> out;
    for (const auto& [name, factory] : factories_)
        out.push_back(name);
    return out;
}

const ObjectiveRegistry& ObjectiveRegistry::builtin()
{
    static const ObjectiveRegistry registry = [] {
        ObjectiveRegistry r;
        r.add("rosenbrock2", [](Eigen::Index dim) {
            if (dim != 0 && dim != 2)
                throw Error(Errc::invalid_parameter, "rosenbrock2 is two-dimensional");
            return rosenbrock2();
        });
        r.add("sphere", [](Eigen::Index dim) { return sphere(dim == 0 ? 10 : dim); });
        r.add("extended-rosenbrock",
              [](Eigen::Index dim) { return extended_rosenbrock(dim == 0 ? 1000 : dim); });
        return r;
    }();
    return registry;
}

} // namespace stlsbb
