#include "support.hpp"

#include "stlsbb/error.hpp"
#include "stlsbb/quadratic.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace stlsbb;
using stlsbb::testing::vec;

namespace {

Eigen::MatrixXd dense_hessian(const QuadraticInstance& inst)
{
    const Eigen::Index n = inst.dim();
    const auto& w = inst.householder();
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    for (int i = 2; i >= 0; --i)
        q = q * (Eigen::MatrixXd::Identity(n, n) - 2.0 * w[i] * w[i].transpose());
    // q = H3 H2 H1
    return q * inst.eigenvalues().asDiagonal() * q.transpose();
}

QuadraticInstance identity_instance(Eigen::Index n)
{
    return diagonal_instance(Vector::Ones(n), Vector::Zero(n));
}

} // namespace

TEST_CASE("spectrum setting validation")
{
    CHECK_THROWS_AS(SpectrumSetting(0, 100), Error);
    CHECK_THROWS_AS(SpectrumSetting(8, 100), Error);
    CHECK_THROWS_AS(SpectrumSetting(1, 1.0), Error);
    CHECK(SpectrumSetting(6, 1e4).min_dim() >= 11);
    try {
        generate_instance(5, SpectrumSetting(6, 1e4), 1);
        FAIL("expected dimension_too_small");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::dimension_too_small);
    }
}

TEST_CASE("instance validation")
{
    const Vector e1 = vec({1, 0});
    CHECK_THROWS_AS(QuadraticInstance({vec({1, 1}), e1, e1}, vec({1, 2}), vec({0, 0})), Error);
    CHECK_THROWS_AS(QuadraticInstance({e1, e1, e1}, vec({1, -2}), vec({0, 0})), Error);
    CHECK_THROWS_AS(QuadraticInstance({e1, e1, e1}, vec({1, 2}), vec({0, 0, 0})), Error);
}

TEST_CASE("hessian examples")
{
    const auto inst = generate_instance(20, SpectrumSetting(1, 100), 3);
    const QuadraticInstance ones(inst.householder(), Vector::Ones(20), inst.linear());
    Rng rng(5, Stream::test_pairs);
    const Vector x = stlsbb::testing::normal_vector(rng, 20);
    CHECK((apply_hessian(ones, x) - x).norm() <= 1e-13 * x.norm());

    const auto diag = diagonal_instance(vec({3, 7}), vec({0, 0}));
    const Vector ax = apply_hessian(diag, vec({1, 1}));
    CHECK(ax[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(ax[1] == doctest::Approx(7.0).epsilon(1e-15));

    CHECK_THROWS_AS(apply_hessian(diag, vec({1, 1, 1})), Error);
}

TEST_CASE("hessian matches dense reconstruction")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto inst = generate_instance(12, SpectrumSetting(2, 1e3), seed);
        const Eigen::MatrixXd a = dense_hessian(inst);
        Rng rng(seed, Stream::test_pairs);
        const Vector x = stlsbb::testing::normal_vector(rng, 12);
        const Vector dense = a * x;
        CHECK((apply_hessian(inst, x) - dense).norm() <= 1e-10 * dense.norm());
    }
    const auto small = generate_instance(4, SpectrumSetting(1, 50), 9);
    const Vector x = vec({1, -2, 0.5, 3});
    const Vector dense = dense_hessian(small) * x;
    CHECK((apply_hessian(small, x) - dense).norm() <= 1e-10 * dense.norm());
}

TEST_CASE("gradient and objective examples")
{
    const auto diag = diagonal_instance(vec({1, 4}), vec({1, 1}));
    const Vector g = gradient(diag, vec({1, 1}));
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(3.0));
    CHECK(objective(diag, vec({1, 1})) == doctest::Approx(0.5));
    CHECK(objective(diag, vec({0, 0})) == 0.0);
    CHECK(objective(identity_instance(3), vec({2, 0, 0})) == doctest::Approx(2.0));
    CHECK(gradient(identity_instance(3), Vector::Zero(3)).norm() == 0.0);

    const auto inst = generate_instance(10, SpectrumSetting(1, 100), 4);
    const Eigen::MatrixXd a = dense_hessian(inst);
    const Vector xstar = a.ldlt().solve(inst.linear());
    CHECK(gradient(inst, xstar).norm() <= 1e-10 * inst.linear().norm());
}

TEST_CASE("hessian symmetry")
{
    const auto inst = generate_instance(50, SpectrumSetting(3, 1e5), 8);
    Rng rng(8, Stream::test_pairs);
    for (int t = 0; t < 20; ++t) {
        const Vector x = stlsbb::testing::normal_vector(rng, 50);
        const Vector y = stlsbb::testing::normal_vector(rng, 50);
        const double a = x.dot(apply_hessian(inst, y)), b = y.dot(apply_hessian(inst, x));
        CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1.0));
    }
}

TEST_CASE("spectrum fidelity")
{
    for (int setting = 1; setting <= 7; ++setting) {
        const double kappa = setting == 5 ? 1e4 : 1e3;
        const auto inst = generate_instance(30, SpectrumSetting(setting, kappa), 100 + setting);
        Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense_hessian(inst)).eigenvalues();
        Eigen::VectorXd v = inst.eigenvalues();
        std::sort(v.begin(), v.end());
        CHECK((eig - v).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("householder involution")
{
    const auto inst = generate_instance(40, SpectrumSetting(1, 10), 2);
    Rng rng(2, Stream::test_pairs);
    const Vector x = stlsbb::testing::normal_vector(rng, 40);
    for (const auto& w : inst.householder()) {
        CHECK(std::abs(w.norm() - 1.0) <= 1e-12);
        Vector z = x;
        reflect(w, z);
        CHECK(std::abs(z.norm() - x.norm()) <= 1e-12 * x.norm());
        reflect(w, z);
        CHECK((z - x).norm() <= 1e-12 * x.norm());
    }
}

TEST_CASE("generator follows the setting table")
{
    const auto one = generate_instance(100, SpectrumSetting(1, 1e4), 1);
    const Vector& v1 = one.eigenvalues();
    CHECK(v1[0] == 1.0);
    CHECK(v1[99] == 1e4);
    for (Eigen::Index j = 1; j < 99; ++j) {
        CHECK(v1[j] > 1.0);
        CHECK(v1[j] < 1e4);
    }
    CHECK(std::is_sorted(v1.begin(), v1.end()));
    CHECK(one.linear().cwiseAbs().maxCoeff() <= 10.0);

    const auto six = generate_instance(100, SpectrumSetting(6, 1e4), 1);
    const Vector& v6 = six.eigenvalues();
    for (Eigen::Index j = 1; j < 10; ++j) {
        CHECK(v6[j] > 1.0);
        CHECK(v6[j] < 100.0);
    }
    for (Eigen::Index j = 10; j < 99; ++j) {
        CHECK(v6[j] > 5e3);
        CHECK(v6[j] < 1e4);
    }

    const auto two = generate_instance(100, SpectrumSetting(2, 1e4), 1);
    const Vector& v2 = two.eigenvalues();
    for (Eigen::Index j = 1; j < 20; ++j)
        CHECK(v2[j] < 100.0);
    for (Eigen::Index j = 20; j < 99; ++j)
        CHECK(v2[j] > 5e3);
}

TEST_CASE("generation is deterministic")
{
    const auto a = generate_instance(30, SpectrumSetting(4, 1e5), 77);
    const auto b = generate_instance(30, SpectrumSetting(4, 1e5), 77);
    const auto c = generate_instance(30, SpectrumSetting(4, 1e5), 78);
    CHECK(a.eigenvalues() == b.eigenvalues());
    CHECK(a.linear() == b.linear());
    for (int i = 0; i < 3; ++i)
        CHECK(a.householder()[i] == b.householder()[i]);
    CHECK(a.linear() != c.linear());
}

TEST_CASE("instance serialization round trip")
{
    const auto inst = generate_instance(20, SpectrumSetting(5, 1e4), 31);
    std::stringstream ss;
    write_instance(ss, inst);
    const auto back = read_instance(ss);
    CHECK(back.setting_id == 5);
    CHECK(back.kappa == 1e4);
    CHECK(back.seed == 31);
    CHECK(back.eigenvalues() == inst.eigenvalues());
    CHECK(back.linear() == inst.linear());
    for (int i = 0; i < 3; ++i)
        CHECK(back.householder()[i] == inst.householder()[i]);

    std::istringstream bad("# stlsbb-quadratic v1\ndim 2\nv 1\n");
    CHECK_THROWS_AS(read_instance(bad), Error);
}

TEST_CASE("solve_bb on the identity")
{
    const auto inst = identity_instance(5);
    const Vector x0 = vec({1, -2, 3, 0.5, 4});
    const auto trace = solve_bb(inst, parse_policy("bb1"), 1e-12, 100, x0, default_alpha0(inst, x0));
    CHECK(trace.termination == Termination::gradient_tolerance);
    CHECK(trace.iterations() <= 2);
    CHECK(trace.rows.back().grad_norm <= 1e-14 * x0.norm());
}

TEST_CASE("solve_bb on a 2d diagonal problem")
{
    const auto inst = diagonal_instance(vec({1, 10}), vec({1, 1}));
    const Vector x0 = Vector::Ones(2);
    const auto trace = solve_bb(inst, parse_policy("gamma:1"), 1e-6, 20000, x0, default_alpha0(inst, x0));
    CHECK(trace.termination == Termination::gradient_tolerance);
    CHECK(trace.rows.back().grad_norm <= 1e-6 * trace.rows.front().grad_norm);
    for (std::size_t i = 1; i < trace.rows.size(); ++i)
        CHECK(trace.rows[i].k == trace.rows[i - 1].k + 1);
}

TEST_CASE("solve_bb cap and curvature along the run")
{
    const auto inst = generate_instance(100, SpectrumSetting(1, 1e6), 3);
    const Vector x0 = Vector::Ones(100);
    const auto capped = solve_bb(inst, parse_policy("bb2"), 1e-12, 10, x0, default_alpha0(inst, x0));
    CHECK(capped.termination == Termination::iteration_cap);
    CHECK(capped.iterations() == 10);

    // alpha_k > 0 means every secant pair had s'y > 0.
    const auto trace = solve_bb(inst, parse_policy("gamma:20"), 1e-6, 20000, x0, default_alpha0(inst, x0));
    for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i)
        CHECK(trace.rows[i].alpha > 0.0);
    CHECK(trace.converged());
}

TEST_CASE("default alpha0")
{
    const auto inst = diagonal_instance(vec({1, 4}), vec({1, 1}));
    CHECK(default_alpha0(inst, vec({1, 1})) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(default_alpha0(inst, vec({1, 0.25})), Error);
}
