#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qg {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

//! Decorrelated child seed for trial/restart number `stream`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    return splitmix64(s);
}

//! Deterministic generator with explicit variate transforms. We avoid
//! std::*_distribution on purpose: their algorithms are unspecified and
//! differ between standard libraries, which would break the byte-exact
//! reproducibility contract of sampling commands.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : gen_(seed)
    {
    }

    //! Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    //! Uniform on (0, 1); never returns 0, safe under log().
    double uniform_pos() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

    //! Standard normal via Box-Muller; pairs are cached.
    double normal()
    {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    //! Gamma(shape, scale 1) by Marsaglia-Tsang squeeze/rejection.
    //! Valid for every shape > 0: shapes below 1 use the boost
    //! X_s = X_{s+1} * U^{1/s}.
    double gamma(double shape)
    {
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z, v;
            do {
                z = normal();
                v = 1.0 + c * z;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * (z * z) * (z * z))
                return d * v;
            if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace qg
