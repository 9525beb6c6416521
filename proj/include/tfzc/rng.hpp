// Seeded random source with derived per-trial streams.
//
// Monte Carlo runs must replay bit-identically from a master seed, including
// when trials execute concurrently. Each (point, trial) gets its own stream
// derived by mixing the master seed with the indices, so results never depend
// on scheduling order. The uniform and Gaussian mappings are spelled out here
// (rather than using std:: distributions) so that a given engine sequence
// always produces the same doubles.

#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <random>

namespace tfzc {

/// splitmix64 finalizer; good avalanche for combining seed material.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a base seed and up to three indices.
inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = mix64(base);
    h = mix64(h ^ (a + 0x9e3779b97f4a7c15ull));
    h = mix64(h ^ (b + 0xc2b2ae3d27d4eb4full));
    h = mix64(h ^ (c + 0x165667b19e3779f9ull));
    return h;
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (explicit, engine-portable).
    double gaussian() {
        double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_gaussian(double variance) {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-variance * std::log(u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace tfzc
