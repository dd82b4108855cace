#include "support.hpp"

#include "stlsbb/error.hpp"
#include "stlsbb/stepcore.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace stlsbb;
using stlsbb::testing::vec;

namespace {

const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

StepPair p11_12() { return {vec({1, 1}), vec({1, 2})}; }
StepPair p11_11() { return {vec({1, 1}), vec({1, 1})}; }
StepPair p20_10() { return {vec({2, 0}), vec({1, 0})}; }

Errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::parse_error;
}

} // namespace

TEST_CASE("step pair validation")
{
    CHECK(code_of([] { StepPair(vec({1, 2}), vec({1})); }) == Errc::dimension_mismatch);
    CHECK(code_of([] { StepPair(Vector(), Vector()); }) == Errc::dimension_mismatch);
    const StepPair p = p11_12();
    CHECK(p.ss() == 2.0);
    CHECK(p.yy() == 5.0);
    CHECK(p.sy() * p.sy() <= p.ss() * p.yy());
}

TEST_CASE("parameters are validated at construction")
{
    CHECK(code_of([] { FamilyParameter(0.0); }) == Errc::invalid_parameter);
    CHECK(code_of([] { FamilyParameter(-1.0); }) == Errc::invalid_parameter);
    CHECK(code_of([] { FamilyParameter(std::numeric_limits<double>::infinity()); }) == Errc::invalid_parameter);
    CHECK(code_of([] { ConvexWeight(1.5); }) == Errc::invalid_parameter);
    CHECK(code_of([] { ConvexWeight(-0.1); }) == Errc::invalid_parameter);
    CHECK_NOTHROW(ConvexWeight(0.0));
    CHECK_NOTHROW(ConvexWeight(1.0));
}

TEST_CASE("curvature")
{
    CHECK(curvature(p11_12()) == 3.0);
    CHECK(curvature({vec({1, 0}), vec({0, 1})}) == 0.0);
    CHECK(curvature({vec({1, 1}), vec({-1, -1})}) == -2.0);
}

TEST_CASE("bb1 and bb2")
{
    CHECK(bb1(p11_12()) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(bb1(p11_11()) == 1.0);
    CHECK(bb1(p20_10()) == 2.0);
    CHECK(bb2(p11_12()) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(bb2(p11_11()) == 1.0);
    CHECK(bb2(p20_10()) == 2.0);

    const StepPair orth(vec({1, 0}), vec({0, 1}));
    CHECK(code_of([&] { bb1(orth); }) == Errc::nonpositive_curvature);
    CHECK(code_of([&] { bb2(orth); }) == Errc::nonpositive_curvature);
    CHECK(code_of([&] { alpha_family(orth, FamilyParameter(1)); }) == Errc::nonpositive_curvature);
}

TEST_CASE("convex combination")
{
    CHECK(alpha_convex(p11_12(), ConvexWeight(0)) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(alpha_convex(p11_12(), ConvexWeight(1)) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(alpha_convex(p11_12(), ConvexWeight(0.5)) == doctest::Approx(19.0 / 30.0).epsilon(1e-15));
}

TEST_CASE("family steplength examples")
{
    CHECK(alpha_family(p11_11(), FamilyParameter(7)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(alpha_family(p11_12(), FamilyParameter(1)) == doctest::Approx(golden).epsilon(1e-14));
    CHECK(alpha_family(p11_12(), FamilyParameter(1e8)) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

    CHECK(alpha_family_prime(p11_11(), FamilyParameter(3)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(alpha_family_prime(p11_12(), FamilyParameter(1)) == doctest::Approx(golden).epsilon(1e-14));
    CHECK(alpha_family_prime(p11_12(), FamilyParameter(1e-8)) == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("tls steplength examples")
{
    CHECK(alpha_tls(p11_12()) == doctest::Approx(golden).epsilon(1e-14));
    CHECK(alpha_tls(p11_11()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(alpha_tls(p20_10()) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(alpha_tls_from_bb(2.0 / 3.0, 0.6) == doctest::Approx(golden).epsilon(1e-14));
}

TEST_CASE("tau from gamma")
{
    CHECK(tau_from_gamma(p11_12(), FamilyParameter(1)).value() == doctest::Approx(0.2705098).epsilon(1e-6));
    CHECK(tau_from_gamma(p11_11(), FamilyParameter(1)).value() == 0.5);
    CHECK(tau_from_gamma(p11_11(), FamilyParameter(1e5)).value() == 0.5);
    CHECK(std::abs(tau_from_gamma(p11_12(), FamilyParameter(1e8)).value() - 1.0) <= 1e-4);
    CHECK(interval_collapsed(1.0, 1.0));
    CHECK_FALSE(interval_collapsed(2.0 / 3.0, 0.6));
}

TEST_CASE("atc cases")
{
    const StepPair pair = p11_12();
    SteplengthPolicy policy{policy::Atc{4}};

    policy.iteration_index = 0;
    policy.prev_alpha = 123.0;
    CHECK(atc_next(policy, pair) == bb1(pair));
    policy.iteration_index = 8;
    CHECK(atc_next(policy, pair) == bb1(pair));

    policy.iteration_index = 1;
    policy.prev_alpha = 0.5;
    CHECK(atc_next(policy, pair) == bb2(pair));
    policy.prev_alpha = 0.63;
    CHECK(atc_next(policy, pair) == 0.63);
    policy.prev_alpha = 5.0;
    CHECK(atc_next(policy, pair) == bb1(pair));

    policy.prev_alpha.reset();
    CHECK(code_of([&] { atc_next(policy, pair); }) == Errc::missing_state);
}

TEST_CASE("next_steplength dispatch")
{
    const StepPair pair = p11_12();
    SteplengthPolicy policy{policy::Bb1{}};
    policy.iteration_index = 3;
    auto [a, next] = next_steplength(policy, pair);
    CHECK(a == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(next.iteration_index == 4);
    REQUIRE(next.prev_alpha);
    CHECK(*next.prev_alpha == a);

    CHECK(next_steplength(SteplengthPolicy{policy::FamilyGamma{FamilyParameter(1)}}, pair).first
          == doctest::Approx(golden).epsilon(1e-14));
    CHECK(next_steplength(SteplengthPolicy{policy::ConvexTau{ConvexWeight(0)}}, pair).first
          == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(next_steplength(SteplengthPolicy{policy::Bb2{}}, pair).first == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("policy parsing")
{
    CHECK(std::holds_alternative<policy::Bb1>(parse_policy("bb1").kind));
    CHECK(std::holds_alternative<policy::Bb2>(parse_policy("bb2").kind));
    const auto g = parse_policy("gamma:1.5");
    REQUIRE(std::holds_alternative<policy::FamilyGamma>(g.kind));
    CHECK(std::get<policy::FamilyGamma>(g.kind).gamma.value() == 1.5);
    CHECK(std::holds_alternative<policy::FamilyGammaPrime>(parse_policy("gammaPrime:2").kind));
    CHECK(std::get<policy::ConvexTau>(parse_policy("tau:0.25").kind).tau.value() == 0.25);
    CHECK(std::get<policy::Atc>(parse_policy("atc:4").kind).cycle == 4);

    for (const char* spec : {"gamma:1", "gamma:1.5", "gammaPrime:20", "tau:0.25", "atc:4", "bb1", "bb2"})
        CHECK(policy_name(parse_policy(spec).kind) == spec);

    CHECK(code_of([] { parse_policy("bb3"); }) == Errc::parse_error);
    CHECK(code_of([] { parse_policy("gamma:"); }) == Errc::parse_error);
    CHECK(code_of([] { parse_policy("gamma:1x"); }) == Errc::parse_error);
    CHECK(code_of([] { parse_policy("gamma:-1"); }) == Errc::invalid_parameter);
    CHECK(code_of([] { parse_policy("tau:2"); }) == Errc::invalid_parameter);
    CHECK(code_of([] { parse_policy("atc:0"); }) == Errc::invalid_parameter);
}

// ---------------------------------------------------------------------------
// properties on random pairs

TEST_CASE("interval containment and limits")
{
    const auto pairs = stlsbb::testing::random_pairs(2000, 5, 11);
    const auto grid = stlsbb::testing::log_grid(1e-6, 1e6);
    for (const auto& pair : pairs) {
        const double hi = bb1(pair), lo = bb2(pair);
        CHECK(lo <= hi);
        for (double gamma : grid) {
            const FamilyParameter p(gamma);
            const double a = alpha_family(pair, p), b = alpha_family_prime(pair, p);
            CHECK(a >= lo);
            CHECK(a <= hi);
            CHECK(b >= lo);
            CHECK(b <= hi);
        }
        CHECK(std::abs(alpha_family(pair, FamilyParameter(1e8)) - hi) <= 1e-6 * hi);
        CHECK(std::abs(alpha_family(pair, FamilyParameter(1e-8)) - lo) <= 1e-6 * lo);
        CHECK(std::abs(alpha_family_prime(pair, FamilyParameter(1e-8)) - hi) <= 1e-6 * hi);
        CHECK(std::abs(alpha_family_prime(pair, FamilyParameter(1e8)) - lo) <= 1e-6 * lo);
    }
}

TEST_CASE("monotonicity in gamma")
{
    const auto pairs = stlsbb::testing::random_pairs(1000, 5, 12);
    const auto grid = stlsbb::testing::log_grid(1e-2, 1e2);
    for (const auto& pair : pairs) {
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const FamilyParameter a(grid[i - 1]), b(grid[i]);
            CHECK(alpha_family(pair, a) < alpha_family(pair, b));
            CHECK(alpha_family_prime(pair, a) > alpha_family_prime(pair, b));
        }
    }
}

TEST_CASE("gamma one crossing, min-max and closed form")
{
    const auto pairs = stlsbb::testing::random_pairs(2000, 5, 13);
    const auto grid = stlsbb::testing::log_grid(1e-6, 1e6);
    for (const auto& pair : pairs) {
        const double tls = alpha_tls(pair);
        CHECK(stlsbb::testing::rel_diff(alpha_family(pair, FamilyParameter(1)),
                                        alpha_family_prime(pair, FamilyParameter(1)))
              <= 1e-12);
        CHECK(stlsbb::testing::rel_diff(tls, alpha_tls_from_bb(bb1(pair), bb2(pair))) <= 1e-12);
        for (double gamma : grid) {
            const FamilyParameter p(gamma);
            CHECK(std::max(alpha_family(pair, p), alpha_family_prime(pair, p)) >= tls - 1e-10);
        }
    }
}

TEST_CASE("tau round trip")
{
    const auto pairs = stlsbb::testing::random_pairs(2000, 5, 14);
    for (const auto& pair : pairs) {
        for (double gamma : {0.01, 0.3, 1.0, 7.0, 100.0}) {
            const FamilyParameter p(gamma);
            const ConvexWeight tau = tau_from_gamma(pair, p);
            CHECK(tau.value() > 0.0);
            CHECK(tau.value() < 1.0);
            CHECK(stlsbb::testing::rel_diff(alpha_convex(pair, tau), alpha_family(pair, p)) <= 1e-12);
        }
    }
}

TEST_CASE("joint scaling leaves every steplength unchanged")
{
    const auto pairs = stlsbb::testing::random_pairs(500, 5, 15);
    for (const auto& pair : pairs) {
        for (double c : {1e-3, 0.5, 4.0, 1e3}) {
            const StepPair scaled(c * pair.s(), c * pair.y());
            CHECK(stlsbb::testing::rel_diff(bb1(pair), bb1(scaled)) <= 1e-12);
            CHECK(stlsbb::testing::rel_diff(bb2(pair), bb2(scaled)) <= 1e-12);
            CHECK(stlsbb::testing::rel_diff(alpha_tls(pair), alpha_tls(scaled)) <= 1e-12);
            CHECK(stlsbb::testing::rel_diff(alpha_family(pair, FamilyParameter(3)),
                                            alpha_family(scaled, FamilyParameter(3)))
                  <= 1e-12);
            CHECK(stlsbb::testing::rel_diff(alpha_family_prime(pair, FamilyParameter(0.2)),
                                            alpha_family_prime(scaled, FamilyParameter(0.2)))
                  <= 1e-12);
        }
    }
}
