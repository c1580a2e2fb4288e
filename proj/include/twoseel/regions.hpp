#pragma once

#include <array>
#include <optional>

#include "twoseel/eel.hpp"

namespace twoseel {

enum class MethodId { OEL, BEL, EEL1, EEL2 };

constexpr std::array<MethodId, 4> kAllMethods = {MethodId::OEL, MethodId::BEL, MethodId::EEL1,
                                                 MethodId::EEL2};
// Column order used by the simulation tables.
constexpr std::array<MethodId, 4> kTableOrder = {MethodId::OEL, MethodId::EEL1, MethodId::BEL,
                                                 MethodId::EEL2};

const char* method_name(MethodId m);
MethodId method_from_name(const std::string& name);

struct BracketFailure : std::runtime_error {
    explicit BracketFailure(const std::string& what) : std::runtime_error(what) {}
};

struct ConfidenceInterval {
    MethodId method = MethodId::OEL;
    double level = 0.0;
    double lower = 0.0, upper = 0.0;
    double critical = 0.0;
    // endpoint sits on a domain-boundary jump instead of solving
    // statistic == critical
    bool lower_at_bound = false, upper_at_bound = false;
};

struct RegionContour {
    MethodId method = MethodId::OEL;
    double level = 0.0;
    std::vector<std::array<double, 2>> vertices;  // closed polyline, angle order
    int failed_rays = 0;
};

// Per-dataset inference context: MELEs, Bartlett factor and mapping
// configurations computed once, then reused across statistic evaluations.
class Analysis {
public:
    Analysis(EstimatingFunction ef, TwoSampleData data);

    const Profiler& profiler() const { return prof_; }
    const Vec& pi_tilde() const { return prof_.mele_pi(); }
    const MomentArrays& arrays() const { return arrays_; }
    const BartlettEstimate& bartlett() const { return bartlett_; }
    double bel_multiplier() const { return bel_.scale; }
    bool bel_uncorrected() const { return bel_.uncorrected; }
    const MappingConfig& config_first_order() const { return cfg1_; }
    const MappingConfig& config_second_order() const { return cfg2_; }

    // Log-likelihood-ratio statistic of the given method at pi; +infinity
    // for OEL/BEL outside the likelihood domain. Throws SolverFailure when
    // the profile solver gives up.
    double statistic(MethodId method, const Vec& pi) const;

    // As statistic(), but also reports degraded evaluations: a BEL value
    // left unscaled by the non-positive-multiplier fallback, or an extended
    // value from a no-preimage boundary fallback.
    struct StatValue {
        double value = 0.0;
        bool flagged = false;
    };
    StatValue statistic_with_flag(MethodId method, const Vec& pi) const;

    bool covers(MethodId method, const Vec& pi0, double level) const;

    ConfidenceInterval confidence_interval(MethodId method, double level) const;
    RegionContour region_contour(MethodId method, double level, int rays) const;

private:
    Profiler prof_;
    MomentArrays arrays_;
    BartlettEstimate bartlett_;
    BelScale bel_;
    MappingConfig cfg1_, cfg2_;
    Vec scale_;
};

double statistic(MethodId method, const EstimatingFunction& ef, const TwoSampleData& data,
                 const Vec& pi);
ConfidenceInterval confidence_interval(MethodId method, const EstimatingFunction& ef,
                                       const TwoSampleData& data, double level);
RegionContour region_contour_2d(MethodId method, const EstimatingFunction& ef,
                                const TwoSampleData& data, double level, int rays);
bool covers(MethodId method, const EstimatingFunction& ef, const TwoSampleData& data,
            const Vec& pi0, double level);

}  // namespace twoseel
