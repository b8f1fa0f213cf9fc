#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <random>

namespace risura {

// splitmix64 step; used to derive independent stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-trial / per-stage seed derivation. Reordering trials or stages never
// changes the seed a given (trial, stage) pair receives.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag) {
    std::uint64_t s = master ^ (0xd1b54a32d192ed03ULL * (stream_tag + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// Deterministic RNG stream. Gaussian draws use Box-Muller on top of the
// raw mt19937_64 output so results do not depend on libstdc++'s
// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        // modulo bias is irrelevant at simulation scale (n << 2^64)
        return eng_() % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard real normal N(0, 1).
    double gauss() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Circularly-symmetric complex normal CN(0, 1) (unit total variance).
    std::complex<double> cgauss() {
        return {gauss() * 0.7071067811865475244, gauss() * 0.7071067811865475244};
    }

    // Unit-modulus complex number with uniform phase.
    std::complex<double> cphase() {
        const double th = uniform(0.0, 6.283185307179586476925286766559);
        return {std::cos(th), std::sin(th)};
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace risura
