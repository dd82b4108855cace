#include "stlsbb/oracle.hpp"

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace stlsbb::oracle {

namespace {

using Quad = boost::multiprecision::float128;

Quad stls_ratio_q(const StepPair& pair, Quad inv_gamma_sq, Quad alpha)
{
    Quad num = 0;
    for (Eigen::Index i = 0; i < pair.dim(); ++i) {
        const Quad r = alpha * Quad(pair.y()[i]) - Quad(pair.s()[i]);
        num += r * r;
    }
    return num / (inv_gamma_sq + alpha * alpha);
}

Quad circle_residual_q(const StepPair& pair, Quad theta)
{
    const Quad a1 = cos(theta);
    const Quad a2 = sin(theta);
    Quad acc = 0;
    for (Eigen::Index i = 0; i < pair.dim(); ++i) {
        const Quad r = a1 * Quad(pair.s()[i]) - a2 * Quad(pair.y()[i]);
        acc += r * r;
    }
    return acc;
}

} // namespace

double stls_ratio(const StepPair& pair, FamilyParameter p, double alpha)
{
    const Quad g = p.value();
    return static_cast<double>(stls_ratio_q(pair, Quad(1) / (g * g), Quad(alpha)));
}

std::pair<double, double> stls_bracket(const StepPair& pair)
{
    const double hi = bb1(pair);
    const double lo = bb2(pair);
    const double margin = 0.1 * (hi - lo) + 1e-8;
    return {lo - margin, hi + margin};
}

double stls_minimizer(const StepPair& pair, FamilyParameter p)
{
    const auto [lo, hi] = stls_bracket(pair);
    const Quad g = p.value();
    const Quad inv_gamma_sq = Quad(1) / (g * g);
    ScalarMinProblem<Quad> problem{
        [&](Quad a) { return stls_ratio_q(pair, inv_gamma_sq, a); },
        Quad(lo),
        Quad(hi),
        Quad(1e-20) * (Quad(1) + Quad(hi)),
    };
    return static_cast<double>(minimize_scalar(problem).argmin);
}

namespace {

// Inverse-form ratio ||beta*s - y||^2 / (t + beta^2); t = 0 gives plain LS.
Quad inverse_ratio_q(const StepPair& pair, Quad t, Quad beta)
{
    Quad num = 0;
    for (Eigen::Index i = 0; i < pair.dim(); ++i) {
        const Quad r = beta * Quad(pair.s()[i]) - Quad(pair.y()[i]);
        num += r * r;
    }
    return t == 0 ? num : num / (t + beta * beta);
}

double inverse_minimizer(const StepPair& pair, Quad t)
{
    const double lo = 1.0 / bb1(pair);
    const double hi = 1.0 / bb2(pair);
    const double margin = 0.1 * (hi - lo) + 1e-8;
    ScalarMinProblem<Quad> problem{
        [&](Quad b) { return inverse_ratio_q(pair, t, b); },
        Quad(lo - margin),
        Quad(hi + margin),
        Quad(1e-20) * (Quad(1) + Quad(hi)),
    };
    return static_cast<double>(Quad(1) / minimize_scalar(problem).argmin);
}

} // namespace

double stls_prime_minimizer(const StepPair& pair, FamilyParameter p)
{
    const Quad g = p.value();
    return inverse_minimizer(pair, Quad(1) / (g * g));
}

double ls_inverse_step_minimizer(const StepPair& pair) { return inverse_minimizer(pair, Quad(0)); }

double ls_step_minimizer(const StepPair& pair)
{
    const auto [lo, hi] = stls_bracket(pair);
    ScalarMinProblem<Quad> problem{
        [&](Quad a) {
            Quad acc = 0;
            for (Eigen::Index i = 0; i < pair.dim(); ++i) {
                const Quad r = a * Quad(pair.y()[i]) - Quad(pair.s()[i]);
                acc += r * r;
            }
            return acc;
        },
        Quad(lo),
        Quad(hi),
        Quad(1e-20) * (Quad(1) + Quad(hi)),
    };
    return static_cast<double>(minimize_scalar(problem).argmin);
}

double homogeneous_residual_min(const StepPair& pair, int grid_points)
{
    if (pair.yy() == 0.0)
        throw Error(Errc::degenerate_input, "homogeneous residual needs y != 0");
    if (grid_points < 8)
        throw Error(Errc::invalid_parameter, "angular grid too coarse");

    // Half circle suffices: (a1, a2) and (-a1, -a2) give the same residual.
    const double h = std::numbers::pi / grid_points;
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        const double theta = i * h;
        const double v = (std::cos(theta) * pair.s() - std::sin(theta) * pair.y()).squaredNorm();
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }

    ScalarMinProblem<Quad> problem{
        [&](Quad t) { return circle_residual_q(pair, t); },
        Quad(best - 2) * Quad(h),
        Quad(best + 2) * Quad(h),
        Quad(1e-19),
    };
    const Quad theta = minimize_scalar(problem, 0).argmin;
    return static_cast<double>(tan(theta));
}

} // namespace stlsbb::oracle
