#pragma once

#include "stlsbb/rng.hpp"
#include "stlsbb/stepcore.hpp"

#include <cmath>
#include <vector>

namespace stlsbb::testing {

inline Vector vec(std::initializer_list<double> values)
{
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values)
        v[i++] = x;
    return v;
}

inline Vector normal_vector(Rng& rng, Eigen::Index n)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = rng.normal();
    return v;
}

/// Standard-normal pairs resampled until s'y > 0.
inline std::vector<StepPair> random_pairs(std::size_t count, Eigen::Index dim, std::uint64_t seed)
{
    Rng rng(seed, Stream::test_pairs);
    std::vector<StepPair> pairs;
    pairs.reserve(count);
    while (pairs.size() < count) {
        Vector s = normal_vector(rng, dim);
        Vector y = normal_vector(rng, dim);
        if (s.dot(y) > 0.0)
            pairs.emplace_back(std::move(s), std::move(y));
    }
    return pairs;
}

inline double rel_diff(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

/// 50 points log-spaced on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int points = 50)
{
    std::vector<double> g;
    for (int i = 0; i < points; ++i)
        g.push_back(lo * std::pow(hi / lo, double(i) / (points - 1)));
    return g;
}

} // namespace stlsbb::testing
