#pragma once

// Globalized BB method: BB-type steplengths guarded by a max-of-last-M
// nonmonotone acceptance test, for general differentiable objectives.

#include "stlsbb/quadratic.hpp"
#include "stlsbb/stepcore.hpp"
#include "stlsbb/trace.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stlsbb {

struct Evaluation {
    double f;
    Vector g;
};

struct Objective {
    std::string name;
    Eigen::Index dim = 0;
    std::function<Evaluation(const Vector&)> eval;
    Vector standard_start;
    std::optional<Vector> minimizer;

    Evaluation operator()(const Vector& x) const;
};

enum class StopKind {
    absolute_gradient, ///< ||g_k|| < epsilon
    relative_gradient, ///< ||g_k|| <= epsilon * ||g_0||
    distance,          ///< ||x_k - target|| <= epsilon
};

struct StopRule {
    StopKind kind = StopKind::relative_gradient;
    double epsilon = 1e-6;
    Vector target;

    std::string describe() const;
};

struct SolverConfig {
    std::size_t memory = 10;
    double beta = 0.1;
    double delta = 0.1;
    double eta = 1e-3;
    double sigma = 0.8;
    double sigma1 = 0.1;
    double sigma2 = 0.9;
    StopRule stop;
    std::size_t max_iter = 100000;
    /// Fixed first step; empty means the gradient-scaled probe rule.
    std::optional<double> alpha0;
    std::size_t max_backtracks = 100;

    /// Throws InvalidParameter unless 0<beta<1, 0<eta<1, delta>0,
    /// 0<sigma1<=sigma<=sigma2<1 and epsilon>0.
    void validate() const;
};

/// The last min(k, M) + 1 objective values.
class NonmonotoneWindow {
public:
    explicit NonmonotoneWindow(std::size_t memory);

    void push(double f);
    double max() const;
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

private:
    std::size_t capacity_;
    std::vector<double> values_;
    std::size_t head_ = 0;
};

/// f_trial <= max(window) - beta * alpha * grad_sq
bool nonmonotone_accept(double f_trial, const NonmonotoneWindow& window, double beta, double alpha,
                        double grad_sq);

/// delta when alpha <= eta, alpha >= 1/eta or alpha is not finite.
double safeguard(double alpha, double eta, double delta) noexcept;

double backtrack(double alpha, double sigma) noexcept;

/// 1/||g0||_inf when f(x0 - g0/||g0||_inf) < f(x0), else 1/(4||g0||_inf).
double initial_steplength(const Objective& objective, const Vector& x0);

RunTrace run(const Objective& objective, const Vector& x0, const SolverConfig& config,
             SteplengthPolicy policy);

/// Replays a trace against the acceptance test and the safeguard band.
/// Returns one message per violation; empty means the trace is consistent.
std::vector<std::string> audit_trace(const RunTrace& trace, const SolverConfig& config);

Objective rosenbrock2();
Objective sphere(Eigen::Index dim);
Objective extended_rosenbrock(Eigen::Index dim);
Objective as_objective(const QuadraticInstance& inst);

/// Objectives by name. Factories receive the requested dimension (0 means
/// the objective's default).
class ObjectiveRegistry {
public:
    using Factory = std::function<Objective(Eigen::Index)>;

    void add(const std::string& name, Factory factory);
    Objective make(const std::string& name, Eigen::Index dim = 0) const;
    std::vector<std::string> names() const;

    static const ObjectiveRegistry& builtin();

private:
    std::map<std::string, Factory> factories_;
};

} // namespace stlsbb
