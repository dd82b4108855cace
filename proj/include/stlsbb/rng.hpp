#pragma once

#include <cstdint>
#include <random>

namespace stlsbb {

/// Named sub-streams of a seeded generator. Each instance field draws from
/// its own stream so adding draws to one field never shifts another.
enum class Stream : std::uint32_t {
    householder1 = 1,
    householder2 = 2,
    householder3 = 3,
    eigenvalues = 4,
    linear_term = 5,
    test_pairs = 100,
};

/// mt19937_64 seeded through std::seed_seq from (seed, stream). Both the
/// engine and the seed_seq algorithm are fixed by the standard; the
/// distributions below are written out here because the std:: ones are
/// implementation-defined.
class Rng {
public:
    Rng(std::uint64_t seed, Stream stream);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    /// Uniform on the open interval (lo, hi).
    double uniform_open(double lo, double hi);
    /// Uniform on the closed interval [lo, hi].
    double uniform_closed(double lo, double hi);
    /// Standard normal (polar Box-Muller).
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace stlsbb
