#include "stlsbb/quadratic.hpp"

#include "stlsbb/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace stlsbb {

SpectrumSetting::SpectrumSetting(int id, double kappa) : id_(id), kappa_(kappa)
{
    if (id < 1 || id > 7)
        throw Error(Errc::invalid_setting, "spectrum setting must be in 1..7");
    if (!(kappa > 1.0) || !std::isfinite(kappa))
        throw Error(Errc::invalid_setting, "kappa must be finite and > 1");
    // Setting 5 has a middle block on (100, kappa/2).
    if (id == 5 && !(kappa > 200.0))
        throw Error(Errc::invalid_setting, "setting 5 needs kappa > 200");
}

Eigen::Index SpectrumSetting::min_dim() const noexcept
{
    switch (id_) {
    case 1: return 2;
    case 6:
    case 7: return 11;
    default: return 10;
    }
}

QuadraticInstance::QuadraticInstance(std::array<Vector, 3> householder, Vector eigenvalues,
                                     Vector linear)
    : householder_(std::move(householder)), eigenvalues_(std::move(eigenvalues)),
      linear_(std::move(linear))
{
    const auto n = eigenvalues_.size();
    if (n == 0 || linear_.size() != n)
        throw Error(Errc::dimension_mismatch, "quadratic: eigenvalues and b must share a nonzero dimension");
    for (const auto& w : householder_) {
        if (w.size() != n)
            throw Error(Errc::dimension_mismatch, "quadratic: Householder vector has wrong dimension");
        if (std::abs(w.norm() - 1.0) > 1e-12)
            throw Error(Errc::invalid_parameter, "quadratic: Householder vector is not unit length");
    }
    if (!(eigenvalues_.array() > 0.0).all())
        throw Error(Errc::invalid_parameter, "quadratic: eigenvalues must be positive");
}

void reflect(const Vector& w, Vector& x) { x.noalias() -= (2.0 * w.dot(x)) * w; }

namespace {

void check_dim(const QuadraticInstance& inst, const Vector& x)
{
    if (x.size() != inst.dim())
        throw Error(Errc::dimension_mismatch, "quadratic: vector dimension does not match instance");
}

// out = A x without allocating when out already has the right size.
void hessian_into(const QuadraticInstance& inst, const Vector& x, Vector& out)
{
    const auto& w = inst.householder();
    out = x;
    reflect(w[2], out);
    reflect(w[1], out);
    reflect(w[0], out);
    out.array() *= inst.eigenvalues().array();
    reflect(w[0], out);
    reflect(w[1], out);
    reflect(w[2], out);
}

Vector unit_normal(Rng& rng, Eigen::Index n)
{
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i)
        w[i] = rng.normal();
    return w / w.norm();
}

} // namespace

Vector apply_hessian(const QuadraticInstance& inst, const Vector& x)
{
    check_dim(inst, x);
    Vector out(x.size());
    hessian_into(inst, x, out);
    return out;
}

Vector gradient(const QuadraticInstance& inst, const Vector& x) { return apply_hessian(inst, x) - inst.linear(); }

double objective(const QuadraticInstance& inst, const Vector& x)
{
    return 0.5 * x.dot(apply_hessian(inst, x)) - inst.linear().dot(x);
}

QuadraticInstance generate_instance(Eigen::Index n, const SpectrumSetting& setting, std::uint64_t seed)
{
    if (n < setting.min_dim())
        throw Error(Errc::dimension_too_small,
                    "setting " + std::to_string(setting.id()) + " needs n >= " + std::to_string(setting.min_dim()));

    Rng rng1(seed, Stream::householder1);
    Rng rng2(seed, Stream::householder2);
    Rng rng3(seed, Stream::householder3);
    std::array<Vector, 3> w{unit_normal(rng1, n), unit_normal(rng2, n), unit_normal(rng3, n)};

    const double kappa = setting.kappa();
    const double half = kappa / 2.0;
    // Blocks of 1-based indices [first, last] and their open ranges.
    struct Block {
        Eigen::Index first, last;
        double lo, hi;
    };
    std::vector<Block> blocks;
    const Eigen::Index n5 = n / 5, n2 = n / 2, n45 = 4 * n / 5;
    switch (setting.id()) {
    case 1: blocks = {{2, n - 1, 1.0, kappa}}; break;
    case 2: blocks = {{2, n5, 1.0, 100.0}, {n5 + 1, n - 1, half, kappa}}; break;
    case 3: blocks = {{2, n2, 1.0, 100.0}, {n2 + 1, n - 1, half, kappa}}; break;
    case 4: blocks = {{2, n45, 1.0, 100.0}, {n45 + 1, n - 1, half, kappa}}; break;
    case 5: blocks = {{2, n5, 1.0, 100.0}, {n5 + 1, n45, 100.0, half}, {n45 + 1, n - 1, half, kappa}}; break;
    case 6: blocks = {{2, 10, 1.0, 100.0}, {11, n - 1, half, kappa}}; break;
    case 7: blocks = {{2, n - 10, 1.0, 100.0}, {n - 9, n - 1, half, kappa}}; break;
    }

    Vector v(n);
    v[0] = 1.0;
    v[n - 1] = kappa;
    Rng rngv(seed, Stream::eigenvalues);
    for (const auto& b : blocks)
        for (Eigen::Index j = b.first; j <= b.last; ++j)
            v[j - 1] = rngv.uniform_open(b.lo, b.hi);
    if (n > 2)
        std::sort(v.data() + 1, v.data() + n - 1);

    Rng rngb(seed, Stream::linear_term);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i)
        b[i] = rngb.uniform_closed(-10.0, 10.0);

    QuadraticInstance inst(std::move(w), std::move(v), std::move(b));
    inst.setting_id = setting.id();
    inst.kappa = kappa;
    inst.seed = seed;
    return inst;
}

QuadraticInstance diagonal_instance(Vector eigenvalues, Vector linear)
{
    const auto n = eigenvalues.size();
    Vector e1 = Vector::Zero(n);
    if (n > 0)
        e1[0] = 1.0;
    return QuadraticInstance({e1, e1, e1}, std::move(eigenvalues), std::move(linear));
}

double default_alpha0(const QuadraticInstance& inst, const Vector& x0)
{
    const double ginf = gradient(inst, x0).lpNorm<Eigen::Infinity>();
    if (ginf == 0.0)
        throw Error(Errc::zero_gradient, "x0 is already stationary");
    return 1.0 / ginf;
}

RunTrace solve_bb(const QuadraticInstance& inst, SteplengthPolicy policy, double epsilon,
                  std::size_t max_iter, const Vector& x0, double alpha0)
{
    check_dim(inst, x0);
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0))
        throw Error(Errc::invalid_parameter, "alpha0 must be positive");

    RunTrace trace;
    trace.alpha0 = alpha0;
    trace.policy = policy_name(policy.kind);
    trace.stop_rule = "relative_gradient:" + format_g17(epsilon);

    const Vector& b = inst.linear();
    Vector x = x0;
    Vector g = gradient(inst, x);
    Vector ag(inst.dim());
    const double g0 = g.norm();
    double alpha = alpha0;
    // alpha_0 is supplied; the policy produces alpha_1, alpha_2, ...
    policy.iteration_index = 1;
    policy.prev_alpha = alpha0;

    for (std::size_t k = 0;; ++k) {
        const double gn = g.norm();
        const double f = 0.5 * x.dot(g) - 0.5 * b.dot(x);
        const bool done = gn <= epsilon * g0;
        if (done || k == max_iter) {
            trace.rows.push_back({k, f, gn, 0.0, 0.0, 0, 0});
            trace.termination = done ? Termination::gradient_tolerance : Termination::iteration_cap;
            break;
        }
        hessian_into(inst, g, ag);
        trace.rows.push_back({k, f, gn, alpha, alpha, 0, 1});
        x.noalias() -= alpha * g;
        // s = -alpha g, y = A s = -alpha A g
        StepPair pair(-alpha * g, -alpha * ag);
        g.noalias() -= alpha * ag;
        try {
            std::tie(alpha, policy) = next_steplength(policy, pair);
        } catch (const Error& e) {
            // s'y = s'As > 0 unless the step underflowed to zero.
            if (e.code() != Errc::nonpositive_curvature)
                throw;
            const double gnext = g.norm();
            if (gnext > epsilon * g0)
                throw;
            trace.rows.push_back({k + 1, 0.5 * x.dot(g) - 0.5 * b.dot(x), gnext, 0.0, 0.0, 0, 0});
            trace.termination = Termination::gradient_tolerance;
            break;
        }
    }
    trace.final_x = std::move(x);
    return trace;
}

void write_instance(std::ostream& os, const QuadraticInstance& inst)
{
    auto line = [&](const char* key, const Vector& v) {
        os << key;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            os << ' ' << format_g17(v[i]);
        os << '\n';
    };
    os << "# stlsbb-quadratic v1\n";
    os << "dim " << inst.dim() << '\n';
    os << "setting " << inst.setting_id << '\n';
    os << "kappa " << format_g17(inst.kappa) << '\n';
    os << "seed " << inst.seed << '\n';
    line("w1", inst.householder()[0]);
    line("w2", inst.householder()[1]);
    line("w3", inst.householder()[2]);
    line("v", inst.eigenvalues());
    line("b", inst.linear());
}

namespace {

double parse_real(const std::string& tok)
{
    double value = 0.0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || end != tok.data() + tok.size())
        throw Error(Errc::parse_error, "instance: bad number '" + tok + "'");
    return value;
}

} // namespace

QuadraticInstance read_instance(std::istream& is)
{
    std::string line;
    Eigen::Index dim = -1;
    int setting = 0;
    double kappa = 0.0;
    std::uint64_t seed = 0;
    std::array<Vector, 3> w;
    Vector v, b;
    int seen = 0;

    auto read_vec = [&](std::istringstream& ss, Vector& out) {
        if (dim < 0)
            throw Error(Errc::parse_error, "instance: 'dim' must precede vectors");
        out.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            std::string tok;
            if (!(ss >> tok))
                throw Error(Errc::parse_error, "instance: vector too short");
            out[i] = parse_real(tok);
        }
        std::string extra;
        if (ss >> extra)
            throw Error(Errc::parse_error, "instance: vector too long");
        ss.clear();
        ++seen;
    };

    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "dim")
            ss >> dim;
        else if (key == "setting")
            ss >> setting;
        else if (key == "kappa") {
            std::string tok;
            ss >> tok;
            kappa = parse_real(tok);
        } else if (key == "seed")
            ss >> seed;
        else if (key == "w1")
            read_vec(ss, w[0]);
        else if (key == "w2")
            read_vec(ss, w[1]);
        else if (key == "w3")
            read_vec(ss, w[2]);
        else if (key == "v")
            read_vec(ss, v);
        else if (key == "b")
            read_vec(ss, b);
        else
            throw Error(Errc::parse_error, "instance: unknown key '" + key + "'");
        if (ss.fail())
            throw Error(Errc::parse_error, "instance: malformed line for '" + key + "'");
    }
    if (seen != 5)
        throw Error(Errc::parse_error, "instance: missing vectors");
    QuadraticInstance inst(std::move(w), std::move(v), std::move(b));
    inst.setting_id = setting;
    inst.kappa = kappa;
    inst.seed = seed;
    return inst;
}

} // namespace stlsbb
