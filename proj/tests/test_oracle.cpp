#include "support.hpp"

#include "stlsbb/oracle.hpp"
#include "stlsbb/stepcore.hpp"

#include <doctest.h>

#include <cmath>

using namespace stlsbb;
using stlsbb::testing::vec;

namespace {
const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
}

TEST_CASE("stls ratio values")
{
    const StepPair same(vec({1, 1}), vec({1, 1}));
    const StepPair pair(vec({1, 1}), vec({1, 2}));
    CHECK(oracle::stls_ratio(same, FamilyParameter(1), 1.0) == 0.0);
    CHECK(oracle::stls_ratio(pair, FamilyParameter(1), 0.0) == doctest::Approx(2.0));
    // (golden - 1)^2 + (2 golden - 1)^2 over 1 + golden^2
    const double at_min = ((golden - 1) * (golden - 1) + (2 * golden - 1) * (2 * golden - 1)) / (1 + golden * golden);
    CHECK(oracle::stls_ratio(pair, FamilyParameter(1), golden) == doctest::Approx(at_min).epsilon(1e-14));
    CHECK(at_min == doctest::Approx(0.145898).epsilon(1e-5));
}

TEST_CASE("golden section")
{
    using P = oracle::ScalarMinProblem<double>;
    auto r = oracle::minimize_scalar(P{[](double a) { return (a - 2) * (a - 2); }, 0.0, 5.0, 1e-8});
    CHECK(std::abs(r.argmin - 2.0) <= 1e-8);
    CHECK(r.min_value == doctest::Approx(0.0).epsilon(1e-12));

    r = oracle::minimize_scalar(P{[](double a) { return std::abs(a); }, -1.0, 1.0, 1e-10});
    CHECK(std::abs(r.argmin) <= 1e-10);

    // Minimizer outside the initial bracket: found after widening.
    r = oracle::minimize_scalar(P{[](double a) { return (a - 7) * (a - 7); }, 0.0, 1.0, 1e-9});
    CHECK(std::abs(r.argmin - 7.0) <= 1e-8);

    const StepPair pair(vec({1, 1}), vec({1, 2}));
    r = oracle::minimize_scalar(
        P{[&](double a) { return oracle::stls_ratio(pair, FamilyParameter(1), a); }, 0.6, 2.0 / 3.0, 1e-12});
    // double precision resolves a smooth minimum only to ~sqrt(eps)
    CHECK(std::abs(r.argmin - golden) <= 1e-7);

    CHECK_THROWS_AS(oracle::minimize_scalar(P{[](double a) { return a; }, 1.0, 0.0, 1e-8}), Error);
    CHECK_THROWS_AS(oracle::minimize_scalar(P{[](double a) { return a; }, 0.0, 1.0, 0.0}), Error);
}

TEST_CASE("homogeneous residual examples")
{
    CHECK(oracle::homogeneous_residual_min({vec({1, 1}), vec({1, 1})}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(oracle::homogeneous_residual_min({vec({1, 1}), vec({1, 2})}) == doctest::Approx(golden).epsilon(1e-9));
    CHECK(oracle::homogeneous_residual_min({vec({2, 0}), vec({1, 0})}) == doctest::Approx(2.0).epsilon(1e-9));
    try {
        oracle::homogeneous_residual_min({vec({1, 1}), vec({0, 0})});
        FAIL("expected degenerate input");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_input);
    }
}

TEST_CASE("least-squares oracles match the closed forms")
{
    for (const auto& pair : stlsbb::testing::random_pairs(200, 5, 21)) {
        CHECK(std::abs(oracle::ls_step_minimizer(pair) - bb2(pair)) <= 1e-6);
        CHECK(std::abs(oracle::ls_inverse_step_minimizer(pair) - bb1(pair)) <= 1e-6);
    }
}

TEST_CASE("bracket contains the closed form")
{
    for (const auto& pair : stlsbb::testing::random_pairs(500, 5, 22)) {
        const auto [lo, hi] = oracle::stls_bracket(pair);
        for (double gamma : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            const double a = alpha_family(pair, FamilyParameter(gamma));
            CHECK(lo < a);
            CHECK(a < hi);
        }
    }
    const auto [lo, hi] = oracle::stls_bracket({vec({1, 1}), vec({1, 1})});
    CHECK(lo < 1.0);
    CHECK(hi > 1.0);
}

TEST_CASE("oracle agreement on random pairs")
{
    for (const auto& pair : stlsbb::testing::random_pairs(200, 5, 23)) {
        for (double gamma : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            const FamilyParameter p(gamma);
            CHECK(std::abs(oracle::stls_minimizer(pair, p) - alpha_family(pair, p)) <= 1e-6);
            CHECK(std::abs(oracle::stls_prime_minimizer(pair, p) - alpha_family_prime(pair, p)) <= 1e-6);
        }
        CHECK(std::abs(oracle::homogeneous_residual_min(pair, 20000) - alpha_tls(pair)) <= 1e-6);
    }
}
