#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace attnsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and up to two
/// counter ids, so concurrent repeats are reproducible regardless of
/// scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
    h = splitmix64(h ^ splitmix64(a));
    h = splitmix64(h ^ splitmix64(b));
    return h;
}

/// mt19937_64 with explicit floating-point conversions. All variate
/// transforms are written out here so sampled values never depend on
/// standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng from_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
        return Rng(derive_seed(master, a, b));
    }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential with the given scale (= mean); strictly positive.
    double exponential(double scale) {
        double x = 0.0;
        while (x <= 0.0) x = -scale * std::log1p(-uniform01());
        return x;
    }

    /// Standard Box-Muller; the sine half of the pair is discarded so the
    /// stream position after a call is always two uniforms.
    double normal(double mean = 0.0, double sd = 1.0) {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + sd * z;
    }

    /// Uniform integer in [0, n).
    int uniform_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace attnsim
