#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

#include "t2u/constants.hpp"

namespace t2u {

// SplitMix64 finalizer. Used only to derive well-separated substream seeds from
// a (master seed, stream index) pair, so that trial t of experiment A never
// shares a stream with trial t of experiment B run from the same master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    // Two avalanche rounds decorrelate adjacent indices and adjacent masters.
    return splitmix64(splitmix64(master) ^ (0xA0761D6478BD642FULL * (index + 1)));
}

// Thin wrapper over mt19937_64 with the handful of draw types the simulator
// needs. Distribution objects are constructed per call; all of the ones used
// here consume a deterministic number of engine words for a given parameter
// set, which keeps replay stable across call sites.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng substream(std::uint64_t master, std::uint64_t index) {
        return Rng(substream_seed(master, index));
    }

    std::uint64_t raw() { return engine_(); }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        // uniform-pair Box-Muller, one deterministic draw pair per call
        double u1 = uniform(0.0, 1.0);
        double u2 = uniform(0.0, 1.0);
        if (u1 <= 0.0) u1 = std::numeric_limits<double>::min();
        return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    // Circularly symmetric complex Gaussian with the given variance per real
    // component (total power = 2 * var_per_component).
    std::complex<double> cgauss(double var_per_component = 1.0) {
        const double s = std::sqrt(var_per_component);
        return {normal(0.0, s), normal(0.0, s)};
    }

    // Unit-modulus phasor with phase uniform on [0, 2*pi).
    std::complex<double> phasor() {
        const double ph = uniform(0.0, 2.0 * kPi);
        return {std::cos(ph), std::sin(ph)};
    }

    std::uint64_t poisson(double mean) {
        return std::poisson_distribution<std::uint64_t>(mean)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace t2u
