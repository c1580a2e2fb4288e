#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "twoseel/linalg.hpp"

namespace twoseel {

struct UnknownDistribution : std::invalid_argument {
    explicit UnknownDistribution(const std::string& what) : std::invalid_argument(what) {}
};

// SplitMix64 output finalizer; the r-th draw of a SplitMix64 stream seeded
// with `seed`. Used to derive independent per-replicate stream seeds so that
// the replicate schedule is free of execution order.
uint64_t splitmix64_at(uint64_t seed, uint64_t r);

// Deterministic uniform/normal stream: mt19937_64 under the hood with an
// explicit 53-bit uniform extraction and polar Box-Muller normals, so the
// draw sequence is fully specified and platform independent.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform_pos() {  // (0, 1]
        return 1.0 - uniform();
    }
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        have_cached_ = true;
        return u * f;
    }

private:
    std::mt19937_64 eng_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

enum class Dist { StdNormal, LogNormal01, ChiSq1, Pareto5, Exp1, Uniform0_30 };

Dist dist_from_name(const std::string& name);
const char* dist_name(Dist d);

double draw(Dist d, Rng& rng);
Vec sample(Dist d, int count, Rng& rng);

}  // namespace twoseel
