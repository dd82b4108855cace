#pragma once

// Brute-force verifiers for the closed-form steplengths. Nothing in here
// calls the closed forms; the minimizers are found by golden-section search
// (and a dense angular grid for the unit-circle problem) on objectives
// evaluated in quad precision.

#include "stlsbb/error.hpp"
#include "stlsbb/stepcore.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace stlsbb::oracle {

template <class Real>
struct ScalarMinProblem {
    std::function<Real(Real)> objective;
    Real lower;
    Real upper;
    Real tolerance;
};

template <class Real>
struct ScalarMinResult {
    Real argmin;
    Real min_value;
};

/// Golden-section search. When the minimizer lands on a bracket end the
/// bracket is widened on that side and the search restarted (at most
/// `max_expansions` times).
template <class Real>
ScalarMinResult<Real> minimize_scalar(const ScalarMinProblem<Real>& problem, int max_expansions = 32)
{
    using std::abs;
    if (!(problem.lower < problem.upper) || !(problem.tolerance > Real(0)))
        throw Error(Errc::bracket_invalid, "bracket must satisfy lower < upper and tolerance > 0");

    const Real inv_phi = (sqrt(Real(5)) - Real(1)) / Real(2);
    const auto& f = problem.objective;
    Real lo = problem.lower;
    Real hi = problem.upper;

    for (int expansion = 0;; ++expansion) {
        Real a = lo, b = hi;
        Real c = b - inv_phi * (b - a);
        Real d = a + inv_phi * (b - a);
        Real fc = f(c), fd = f(d);
        // Width shrinks by 0.618 per step; 400 steps is far below any tolerance.
        for (int it = 0; it < 400 && b - a > problem.tolerance; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        const Real x = (a + b) / Real(2);
        const Real width = hi - lo;
        const bool at_lo = x - lo <= problem.tolerance;
        const bool at_hi = hi - x <= problem.tolerance;
        if (expansion >= max_expansions || (!at_lo && !at_hi))
            return {x, f(x)};
        if (at_lo)
            lo -= width;
        if (at_hi)
            hi += width;
    }
}

/// ||alpha*y - s||^2 / (1/gamma^2 + alpha^2)
double stls_ratio(const StepPair& pair, FamilyParameter p, double alpha);

/// [bb2 - m, bb1 + m] with m = 0.1*(bb1 - bb2) + 1e-8.
std::pair<double, double> stls_bracket(const StepPair& pair);

/// Golden-section minimizer of stls_ratio over stls_bracket().
double stls_minimizer(const StepPair& pair, FamilyParameter p);

/// Steplength 1/beta* where beta* minimizes the inverse-form ratio
/// ||beta*s - y||^2 / (1/gamma^2 + beta^2).
double stls_prime_minimizer(const StepPair& pair, FamilyParameter p);

/// argmin_alpha ||alpha*y - s||^2 (ordinary least squares in alpha).
double ls_step_minimizer(const StepPair& pair);

/// 1/beta* with beta* = argmin_beta ||beta*s - y||^2.
double ls_inverse_step_minimizer(const StepPair& pair);

/// Minimizes ||a1*s - a2*y|| over a1^2 + a2^2 = 1 on a dense angular grid,
/// refines by golden section, and returns the steplength a2/a1 at the
/// minimizer.
double homogeneous_residual_min(const StepPair& pair, int grid_points = 100000);

} // namespace stlsbb::oracle
