#include "twoseel/regions.hpp"

#include <cmath>

namespace twoseel {

const char* method_name(MethodId m) {
    switch (m) {
        case MethodId::OEL: return "oel";
        case MethodId::BEL: return "bel";
        case MethodId::EEL1: return "eel1";
        case MethodId::EEL2: return "eel2";
    }
    return "?";
}

MethodId method_from_name(const std::string& name) {
    for (MethodId m : kAllMethods)
        if (name == method_name(m)) return m;
    throw DomainError("unknown method '" + name + "' (expected oel, bel, eel1 or eel2)");
}

Analysis::Analysis(EstimatingFunction ef, TwoSampleData data)
    : prof_(std::move(ef), std::move(data)),
      arrays_(moment_arrays(prof_.ef(), prof_.data(), prof_.mele_x(), prof_.mele_y())),
      bartlett_(bartlett_factor(arrays_, prof_.ef().q)),
      bel_(bel_scale(bartlett_.eta, prof_.data().total())),
      cfg1_(MappingConfig::first_order()),
      cfg2_(MappingConfig::second_order(bartlett_.eta,
                                        1.0 / std::sqrt(prof_.data().smaller_sample()))),
      scale_(prof_.pi_scale()) {}

double Analysis::statistic(MethodId method, const Vec& pi) const {
    return statistic_with_flag(method, pi).value;
}

Analysis::StatValue Analysis::statistic_with_flag(MethodId method, const Vec& pi) const {
    switch (method) {
        case MethodId::OEL:
        case MethodId::BEL: {
            const ProfileSolution sol = prof_.loglik(pi);
            if (sol.status == DomainStatus::MaxIters)
                throw SolverFailure("statistic: profile solver did not converge");
            if (sol.status == DomainStatus::Exterior)
                return {std::numeric_limits<double>::infinity(), false};
            if (method == MethodId::OEL) return {sol.loglik, false};
            return {sol.loglik * bel_.scale, bel_.uncorrected};
        }
        case MethodId::EEL1: {
            const RayInversion inv = inverse_map(prof_, pi, cfg1_);
            return {inv.l_at_prime, inv.no_preimage};
        }
        case MethodId::EEL2: {
            const RayInversion inv = inverse_map(prof_, pi, cfg2_);
            return {inv.l_at_prime, inv.no_preimage};
        }
    }
    throw std::logic_error("statistic: bad method");
}

bool Analysis::covers(MethodId method, const Vec& pi0, double level) const {
    return statistic(method, pi0) <= chisq_quantile(prof_.ef().q, level);
}

ConfidenceInterval Analysis::confidence_interval(MethodId method, double level) const {
    if (prof_.ef().p != 1)
        throw std::invalid_argument("confidence_interval: requires p == 1");
    if (!(level > 0.5 && level < 0.9999))
        throw DomainError("confidence_interval: level must lie in (0.5, 0.9999)");

    ConfidenceInterval ci;
    ci.method = method;
    ci.level = level;
    ci.critical = chisq_quantile(1, level);
    const double center = pi_tilde()[0];
    const double step0 = 0.5 * scale_[0];

    // distances from the MELE along the chosen direction
    const auto endpoint = [&](double sign, bool& at_bound) {
        // doubling bracket outward from the MELE until the statistic exceeds
        // the critical value (an Exterior jump to +inf is a valid bracket end)
        double inside = 0.0;
        double step = step0;
        double outside = 0.0;
        bool bracketed = false;
        for (int k = 0; k < 64; ++k) {
            outside = inside + step;
            const double s = statistic(method, {center + sign * outside});
            if (s > ci.critical) {
                bracketed = true;
                break;
            }
            inside = outside;
            step *= 2.0;
        }
        if (!bracketed)
            throw BracketFailure(std::string("confidence_interval: statistic never exceeded the "
                                             "critical value after 64 doublings (") +
                                 method_name(method) + ")");
        double a = inside, b = outside;  // statistic(a) <= c < statistic(b)
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            const double s = statistic(method, {center + sign * mid});
            if (std::fabs(s - ci.critical) < 1e-6) {
                at_bound = false;
                return center + sign * mid;
            }
            if (s <= ci.critical)
                a = mid;
            else
                b = mid;
            if (b - a < 1e-13 * std::max(1.0, b)) break;
        }
        // interval collapsed without matching the critical value: the
        // endpoint sits on the domain-boundary jump
        at_bound = true;
        return center + sign * a;
    };

    ci.upper = endpoint(+1.0, ci.upper_at_bound);
    ci.lower = endpoint(-1.0, ci.lower_at_bound);
    return ci;
}

RegionContour Analysis::region_contour(MethodId method, double level, int rays) const {
    if (prof_.ef().p != 2)
        throw std::invalid_argument("region_contour: requires p == 2");
    if (rays < 16) throw DomainError("region_contour: rays must be >= 16");
    if (!(level > 0.5 && level < 0.9999))
        throw DomainError("region_contour: level must lie in (0.5, 0.9999)");

    RegionContour contour;
    contour.method = method;
    contour.level = level;
    const double c = chisq_quantile(2, level);
    const Vec& center = pi_tilde();

    for (int i = 0; i < rays; ++i) {
        const double ang = 2.0 * M_PI * i / rays;
        const Vec dir = {std::cos(ang) * scale_[0], std::sin(ang) * scale_[1]};
        const auto stat_at = [&](double r) {
            return statistic(method, {center[0] + r * dir[0], center[1] + r * dir[1]});
        };
        double inside = 0.0, r = 0.5;
        bool bracketed = false;
        for (int k = 0; k < 64; ++k) {
            if (stat_at(r) > c) {
                bracketed = true;
                break;
            }
            inside = r;
            r *= 2.0;
        }
        if (!bracketed) {
            ++contour.failed_rays;
            continue;
        }
        double a = inside, b = r;
        double radius = 0.5 * (a + b);
        for (int it = 0; it < 200; ++it) {
            radius = 0.5 * (a + b);
            const double s = stat_at(radius);
            if (std::fabs(s - c) < 1e-6) break;
            if (s <= c)
                a = radius;
            else
                b = radius;
            if (b - a < 1e-13 * std::max(1.0, b)) {
                radius = a;
                break;
            }
        }
        contour.vertices.push_back({center[0] + radius * dir[0], center[1] + radius * dir[1]});
    }

    if (contour.failed_rays * 10 > rays)
        throw BracketFailure("region_contour: more than 10% of rays failed to bracket");
    return contour;
}

double statistic(MethodId method, const EstimatingFunction& ef, const TwoSampleData& data,
                 const Vec& pi) {
    return Analysis(ef, data).statistic(method, pi);
}

ConfidenceInterval confidence_interval(MethodId method, const EstimatingFunction& ef,
                                       const TwoSampleData& data, double level) {
    return Analysis(ef, data).confidence_interval(method, level);
}

RegionContour region_contour_2d(MethodId method, const EstimatingFunction& ef,
                                const TwoSampleData& data, double level, int rays) {
    return Analysis(ef, data).region_contour(method, level, rays);
}

bool covers(MethodId method, const EstimatingFunction& ef, const TwoSampleData& data,
            const Vec& pi0, double level) {
    return Analysis(ef, data).covers(method, pi0, level);
}

}  // namespace twoseel
