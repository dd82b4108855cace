#pragma once

// Strictly convex quadratics f(x) = 1/2 x'Q diag(v) Q'x - b'x with
// Q = (I - 2 w3 w3')(I - 2 w2 w2')(I - 2 w1 w1'), applied matrix-free, plus
// the random spectrum generators and the plain BB gradient iteration.

#include "stlsbb/stepcore.hpp"
#include "stlsbb/trace.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>

namespace stlsbb {

/// One row of the spectrum recipe table: which ranges the interior
/// eigenvalues are drawn from, and the condition number.
class SpectrumSetting {
public:
    SpectrumSetting(int id, double kappa);

    int id() const noexcept { return id_; }
    double kappa() const noexcept { return kappa_; }

    /// Smallest dimension for which every index breakpoint is meaningful.
    Eigen::Index min_dim() const noexcept;

private:
    int id_;
    double kappa_;
};

class QuadraticInstance {
public:
    QuadraticInstance(std::array<Vector, 3> householder, Vector eigenvalues, Vector linear);

    Eigen::Index dim() const noexcept { return eigenvalues_.size(); }
    const std::array<Vector, 3>& householder() const noexcept { return householder_; }
    const Vector& eigenvalues() const noexcept { return eigenvalues_; }
    const Vector& linear() const noexcept { return linear_; }

    // Provenance; setting 0 means "not generated".
    int setting_id = 0;
    double kappa = 0.0;
    std::uint64_t seed = 0;

private:
    std::array<Vector, 3> householder_;
    Vector eigenvalues_;
    Vector linear_;
};

/// A x where A = Q diag(v) Q'. O(n), never forms A.
Vector apply_hessian(const QuadraticInstance& inst, const Vector& x);
Vector gradient(const QuadraticInstance& inst, const Vector& x);
double objective(const QuadraticInstance& inst, const Vector& x);

/// x <- (I - 2 w w') x
void reflect(const Vector& w, Vector& x);

QuadraticInstance generate_instance(Eigen::Index n, const SpectrumSetting& setting,
                                    std::uint64_t seed);

/// Diagonal instance (all reflections about e_1 so Q = I - 2 e1 e1').
QuadraticInstance diagonal_instance(Vector eigenvalues, Vector linear);

/// Plain BB iteration x_{k+1} = x_k - alpha_k g_k with no line search.
/// Stops when ||g_k|| <= epsilon * ||g_0|| or after max_iter steps.
RunTrace solve_bb(const QuadraticInstance& inst, SteplengthPolicy policy, double epsilon,
                  std::size_t max_iter, const Vector& x0, double alpha0);

/// 1 / ||g_0||_inf, the default first step for quadratic runs.
double default_alpha0(const QuadraticInstance& inst, const Vector& x0);

void write_instance(std::ostream& os, const QuadraticInstance& inst);
QuadraticInstance read_instance(std::istream& is);

} // namespace stlsbb
