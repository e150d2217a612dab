#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace sfdma {

/// Counter-based deterministic generator (SplitMix64 output function over
/// seed + k*gamma). Draw k depends only on (seed, k), so sequences are
/// reproducible across platforms and the draw counter doubles as a stream
/// position. Transform conventions are part of the reproducibility
/// contract:
///   uniform:        one raw draw, 53-bit mantissa, in [0, 1)
///   normal_pair:    two raw draws, Box-Muller (cos/sin branches)
///   normal:         one Box-Muller pair, second value discarded
///   logistic:       one raw draw, ln(u/(1-u))
///   complex_normal: one Box-Muller pair, CN(0, var): re/im ~ N(0, var/2)
struct SeededRng {
    static constexpr const char* kAlgorithm = "splitmix64";

    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    SeededRng() = default;
    explicit SeededRng(std::uint64_t s) : seed(s) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed + (++counter) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Independent child stream; used to decouple e.g. data shuffling from
    /// channel noise so adding draws to one does not shift the other.
    SeededRng derive(std::uint64_t stream) const {
        SeededRng child;
        std::uint64_t z = (seed ^ 0xA0761D6478BD642FULL) + stream * 0xE7037ED1A0B428DBULL;
        z = (z ^ (z >> 32)) * 0xD6E8FEB86659FD93ULL;
        child.seed = z ^ (z >> 32);
        return child;
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1); safe under log.
    double uniform_open() {
        double u = uniform();
        return u > 0.0 ? u : 0x1.0p-53;
    }

    void normal_pair(double& z0, double& z1) {
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        z0 = r * std::cos(6.283185307179586476925286766559 * u2);
        z1 = r * std::sin(6.283185307179586476925286766559 * u2);
    }

    double normal() {
        double z0, z1;
        normal_pair(z0, z1);
        return z0;
    }

    double logistic() {
        double u = uniform_open();
        if (u >= 1.0) u = 1.0 - 0x1.0p-53;
        return std::log(u / (1.0 - u));
    }

    std::complex<double> complex_normal(double var) {
        double z0, z1;
        normal_pair(z0, z1);
        double s = std::sqrt(var * 0.5);
        return {s * z0, s * z1};
    }

    /// Uniform integer in [0, n).
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
};

}  // namespace sfdma
