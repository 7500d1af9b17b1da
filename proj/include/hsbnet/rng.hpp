#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hsbnet::rng {

// Hand-rolled transforms on top of mt19937_64 so that streams are identical
// across standard libraries (std::*_distribution is implementation-defined).

/// Uniform draw in [0, 1).
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

/// Standard normal via Box-Muller; consumes two draws per sample.
inline double normal01(std::mt19937_64& gen) {
    const double u1 = 1.0 - uniform01(gen);  // (0, 1]
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double normal(std::mt19937_64& gen, double mean, double stddev) {
    return mean + stddev * normal01(gen);
}

inline double exponential(std::mt19937_64& gen, double rate) {
    return -std::log(1.0 - uniform01(gen)) / rate;
}

/// Poisson sample by Knuth's product method; fine for the small per-slot means used here.
inline int poisson(std::mt19937_64& gen, double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform01(gen);
    while (prod > limit) {
        ++k;
        prod *= uniform01(gen);
    }
    return k;
}

}  // namespace hsbnet::rng
