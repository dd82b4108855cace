#include "stlsbb/rng.hpp"

#include <cmath>

namespace stlsbb {

Rng::Rng(std::uint64_t seed, Stream stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    engine_.seed(seq);
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_open(double lo, double hi)
{
    for (;;) {
        const double x = lo + (hi - lo) * uniform01();
        if (x > lo && x < hi)
            return x;
    }
}

double Rng::uniform_closed(double lo, double hi)
{
    // 2^53 + 1 equally spaced points including both ends.
    for (;;) {
        const std::uint64_t k = engine_() >> 10;
        if (k <= (std::uint64_t{1} << 53))
            return lo + (hi - lo) * (static_cast<double>(k) * 0x1.0p-53);
    }
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, r2;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

} // namespace stlsbb
