#include "twoseel/rng.hpp"

#include <cmath>

namespace twoseel {

uint64_t splitmix64_at(uint64_t seed, uint64_t r) {
    uint64_t z = seed + (r + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Dist dist_from_name(const std::string& name) {
    if (name == "stdnormal") return Dist::StdNormal;
    if (name == "lognormal") return Dist::LogNormal01;
    if (name == "chisq1") return Dist::ChiSq1;
    if (name == "pareto5") return Dist::Pareto5;
    if (name == "exp1") return Dist::Exp1;
    if (name == "uniform0_30") return Dist::Uniform0_30;
    throw UnknownDistribution("unknown distribution '" + name + "'");
}

const char* dist_name(Dist d) {
    switch (d) {
        case Dist::StdNormal: return "stdnormal";
        case Dist::LogNormal01: return "lognormal";
        case Dist::ChiSq1: return "chisq1";
        case Dist::Pareto5: return "pareto5";
        case Dist::Exp1: return "exp1";
        case Dist::Uniform0_30: return "uniform0_30";
    }
    return "?";
}

double draw(Dist d, Rng& rng) {
    switch (d) {
        case Dist::StdNormal: return rng.normal();
        case Dist::LogNormal01: return std::exp(rng.normal());
        case Dist::ChiSq1: {
            const double z = rng.normal();
            return z * z;
        }
        case Dist::Pareto5: return std::pow(rng.uniform_pos(), -0.2);  // scale 1, shape 5
        case Dist::Exp1: return -std::log(rng.uniform_pos());
        case Dist::Uniform0_30: return 30.0 * rng.uniform();
    }
    throw UnknownDistribution("draw: bad distribution id");
}

Vec sample(Dist d, int count, Rng& rng) {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    Vec out(count);
    for (int i = 0; i < count; ++i) out[i] = draw(d, rng);
    return out;
}

}  // namespace twoseel
