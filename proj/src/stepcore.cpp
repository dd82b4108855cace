#include "stlsbb/stepcore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

namespace stlsbb {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::nonpositive_curvature: return "NonpositiveCurvature";
    case Errc::invalid_parameter: return "InvalidParameter";
    case Errc::missing_state: return "MissingState";
    case Errc::bracket_invalid: return "BracketInvalid";
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::invalid_setting: return "InvalidSetting";
    case Errc::dimension_too_small: return "DimensionTooSmall";
    case Errc::zero_gradient: return "ZeroGradient";
    case Errc::line_search_stall: return "LineSearchStall";
    case Errc::all_failed_on_problem: return "AllFailedOnProblem";
    case Errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

StepPair::StepPair(Vector s, Vector y) : s_(std::move(s)), y_(std::move(y))
{
    if (s_.size() == 0 || s_.size() != y_.size())
        throw Error(Errc::dimension_mismatch, "step pair: s and y must have equal, nonzero dimension");
    ss_ = s_.squaredNorm();
    yy_ = y_.squaredNorm();
    sy_ = s_.dot(y_);
}

FamilyParameter::FamilyParameter(double gamma) : gamma_(gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw Error(Errc::invalid_parameter, "gamma must be positive and finite");
}

ConvexWeight::ConvexWeight(double tau) : tau_(tau)
{
    if (!(tau >= 0.0 && tau <= 1.0))
        throw Error(Errc::invalid_parameter, "tau must lie in [0, 1]");
}

namespace {

void require_curvature(const StepPair& pair)
{
    if (!(pair.sy() > 0.0))
        throw Error(Errc::nonpositive_curvature, "s'y <= 0");
}

// d + sqrt(d^2 + q^2) without cancellation when d <= 0.
double plus_root(double d, double q)
{
    const double r = std::hypot(d, q);
    if (d > 0.0)
        return d + r;
    return q * (q / (r - d));
}

} // namespace

double curvature(const StepPair& pair) noexcept { return pair.sy(); }

double bb1(const StepPair& pair)
{
    require_curvature(pair);
    return pair.ss() / pair.sy();
}

double bb2(const StepPair& pair)
{
    require_curvature(pair);
    return pair.sy() / pair.yy();
}

double alpha_convex(const StepPair& pair, ConvexWeight w)
{
    const double lo = bb2(pair);
    const double hi = bb1(pair);
    return lo + w.value() * (hi - lo);
}

double alpha_family(const StepPair& pair, FamilyParameter p)
{
    require_curvature(pair);
    const double g = p.value();
    const double d = pair.ss() - pair.yy() / (g * g);
    const double q = 2.0 * pair.sy() / g;
    return plus_root(d, q) / (2.0 * pair.sy());
}

double alpha_family_prime(const StepPair& pair, FamilyParameter p)
{
    require_curvature(pair);
    const double g = p.value();
    const double d = pair.yy() - pair.ss() / (g * g);
    const double q = 2.0 * pair.sy() / g;
    return 2.0 * pair.sy() / plus_root(d, q);
}

double alpha_tls(const StepPair& pair) { return alpha_family(pair, FamilyParameter(1.0)); }

double alpha_tls_from_bb(double bb1_value, double bb2_value)
{
    const double u = bb1_value - 1.0 / bb2_value;
    return plus_root(u, 2.0) / 2.0;
}

bool interval_collapsed(double bb1_value, double bb2_value) noexcept
{
    return bb1_value - bb2_value <= 1e-14 * std::max(1.0, bb1_value);
}

ConvexWeight tau_from_gamma(const StepPair& pair, FamilyParameter p)
{
    const double hi = bb1(pair);
    const double lo = bb2(pair);
    if (interval_collapsed(hi, lo))
        return ConvexWeight(0.5);
    const double tau = (alpha_family(pair, p) - lo) / (hi - lo);
    return ConvexWeight(std::clamp(tau, 0.0, 1.0));
}

double atc_next(const SteplengthPolicy& policy, const StepPair& pair)
{
    const auto* atc = std::get_if<policy::Atc>(&policy.kind);
    if (atc == nullptr || atc->cycle == 0)
        throw Error(Errc::invalid_parameter, "atc_next needs an ATC policy with cycle >= 1");
    const double hi = bb1(pair);
    const double lo = bb2(pair);
    if (policy.iteration_index % atc->cycle == 0)
        return hi;
    if (!policy.prev_alpha)
        throw Error(Errc::missing_state, "ATC off-cycle step needs the previous steplength");
    const double prev = *policy.prev_alpha;
    if (prev <= lo)
        return lo;
    if (prev >= hi)
        return hi;
    return prev;
}

std::pair<double, SteplengthPolicy> next_steplength(const SteplengthPolicy& current,
                                                    const StepPair& pair)
{
    struct Dispatch {
        const SteplengthPolicy& policy;
        const StepPair& pair;

        double operator()(const policy::Bb1&) const { return bb1(pair); }
        double operator()(const policy::Bb2&) const { return bb2(pair); }
        double operator()(const policy::FamilyGamma& k) const { return alpha_family(pair, k.gamma); }
        double operator()(const policy::FamilyGammaPrime& k) const
        {
            return alpha_family_prime(pair, k.gamma);
        }
        double operator()(const policy::ConvexTau& k) const { return alpha_convex(pair, k.tau); }
        double operator()(const policy::Atc&) const { return atc_next(policy, pair); }
    };

    const double alpha = std::visit(Dispatch{current, pair}, current.kind);
    SteplengthPolicy next = current;
    next.prev_alpha = alpha;
    ++next.iteration_index;
    return {alpha, next};
}

namespace {

double parse_real(std::string_view text, const std::string& spec)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw Error(Errc::parse_error, "bad number in policy '" + spec + "'");
    return value;
}

std::string format_real(double value)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

} // namespace

SteplengthPolicy parse_policy(const std::string& spec)
{
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string_view arg =
        colon == std::string::npos ? std::string_view{} : std::string_view(spec).substr(colon + 1);
    const bool has_arg = colon != std::string::npos;

    if (head == "bb1" && !has_arg)
        return {policy::Bb1{}};
    if (head == "bb2" && !has_arg)
        return {policy::Bb2{}};
    if (!has_arg || arg.empty())
        throw Error(Errc::parse_error, "unknown policy '" + spec + "'");

    if (head == "gamma")
        return {policy::FamilyGamma{FamilyParameter(parse_real(arg, spec))}};
    if (head == "gammaPrime")
        return {policy::FamilyGammaPrime{FamilyParameter(parse_real(arg, spec))}};
    if (head == "tau")
        return {policy::ConvexTau{ConvexWeight(parse_real(arg, spec))}};
    if (head == "atc") {
        std::size_t m = 0;
        const auto* end = arg.data() + arg.size();
        const auto [ptr, ec] = std::from_chars(arg.data(), end, m);
        if (ec != std::errc() || ptr != end)
            throw Error(Errc::parse_error, "bad cycle length in policy '" + spec + "'");
        if (m == 0)
            throw Error(Errc::invalid_parameter, "ATC cycle length must be >= 1");
        return {policy::Atc{m}};
    }
    throw Error(Errc::parse_error, "unknown policy '" + spec + "'");
}

std::string policy_name(const PolicyKind& kind)
{
    struct Name {
        std::string operator()(const policy::Bb1&) const { return "bb1"; }
        std::string operator()(const policy::Bb2&) const { return "bb2"; }
        std::string operator()(const policy::FamilyGamma& k) const
        {
            return "gamma:" + format_real(k.gamma.value());
        }
        std::string operator()(const policy::FamilyGammaPrime& k) const
        {
            return "gammaPrime:" + format_real(k.gamma.value());
        }
        std::string operator()(const policy::ConvexTau& k) const
        {
            return "tau:" + format_real(k.tau.value());
        }
        std::string operator()(const policy::Atc& k) const { return "atc:" + std::to_string(k.cycle); }
    };
    return std::visit(Name{}, kind);
}

} // namespace stlsbb
