#pragma once

// Barzilai-Borwein steplength formulas: the two classical BB steps, their
// convex combinations, and the scaled-total-least-squares family
// alpha(gamma) / alpha'(gamma) together with the adaptive truncated cyclic
// (ATC) rule. Everything here is a pure function of its arguments.

#include "stlsbb/error.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace stlsbb {

using Vector = Eigen::VectorXd;

/// Secant pair s = x_k - x_{k-1}, y = g_k - g_{k-1}.
///
/// The three inner products every formula needs are computed once at
/// construction.
class StepPair {
public:
    StepPair(Vector s, Vector y);

    const Vector& s() const noexcept { return s_; }
    const Vector& y() const noexcept { return y_; }

    double ss() const noexcept { return ss_; }
    double yy() const noexcept { return yy_; }
    double sy() const noexcept { return sy_; }

    Eigen::Index dim() const noexcept { return s_.size(); }

private:
    Vector s_;
    Vector y_;
    double ss_;
    double yy_;
    double sy_;
};

/// STLS scale gamma > 0.
class FamilyParameter {
public:
    explicit FamilyParameter(double gamma);
    double value() const noexcept { return gamma_; }

private:
    double gamma_;
};

/// Convex weight tau in [0, 1].
class ConvexWeight {
public:
    explicit ConvexWeight(double tau);
    double value() const noexcept { return tau_; }

private:
    double tau_;
};

namespace policy {
struct Bb1 {};
struct Bb2 {};
struct FamilyGamma { FamilyParameter gamma; };
struct FamilyGammaPrime { FamilyParameter gamma; };
struct ConvexTau { ConvexWeight tau; };
struct Atc { std::size_t cycle; };
} // namespace policy

using PolicyKind = std::variant<policy::Bb1, policy::Bb2, policy::FamilyGamma,
                                policy::FamilyGammaPrime, policy::ConvexTau,
                                policy::Atc>;

/// A steplength rule plus the state it carries between iterations.
///
/// `iteration_index` is the index k of the steplength the next call to
/// next_steplength() produces; `prev_alpha` is alpha_{k-1}. Only ATC reads
/// them, but every rule advances them.
struct SteplengthPolicy {
    PolicyKind kind;
    std::optional<double> prev_alpha;
    std::size_t iteration_index = 0;

    SteplengthPolicy(PolicyKind k = policy::Bb1{}) : kind(k) {}
};

/// Parses `bb1 | bb2 | gamma:<v> | gammaPrime:<v> | tau:<v> | atc:<m>`.
SteplengthPolicy parse_policy(const std::string& spec);

/// Inverse of parse_policy(); round-trips exactly.
std::string policy_name(const PolicyKind& kind);

double curvature(const StepPair& pair) noexcept;

double bb1(const StepPair& pair);
double bb2(const StepPair& pair);
double alpha_convex(const StepPair& pair, ConvexWeight w);
double alpha_family(const StepPair& pair, FamilyParameter p);
double alpha_family_prime(const StepPair& pair, FamilyParameter p);
double alpha_tls(const StepPair& pair);

/// The gamma = 1 member written in terms of the two BB steps only.
double alpha_tls_from_bb(double bb1_value, double bb2_value);

/// Weight tau with alpha_convex(pair, tau) == alpha_family(pair, p).
/// Returns 1/2 when the [bb2, bb1] interval has collapsed.
ConvexWeight tau_from_gamma(const StepPair& pair, FamilyParameter p);

/// ATC rule: bb1 at the start of each cycle, otherwise alpha_{k-1} clamped
/// to [bb2, bb1].
double atc_next(const SteplengthPolicy& policy, const StepPair& pair);

/// Dispatch over all policy kinds. Returns the steplength and the policy
/// state advanced by one iteration.
std::pair<double, SteplengthPolicy> next_steplength(const SteplengthPolicy& policy,
                                                    const StepPair& pair);

/// True when bb1 - bb2 <= 1e-14 * max(1, bb1).
bool interval_collapsed(double bb1_value, double bb2_value) noexcept;

} // namespace stlsbb
