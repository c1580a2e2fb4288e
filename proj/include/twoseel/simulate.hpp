#pragma once

#include <iosfwd>
#include <optional>

#include "twoseel/regions.hpp"
#include "twoseel/rng.hpp"

namespace twoseel {

enum class Scenario { Example1, Example2, Example3, Example4, MeanNormal };

Scenario scenario_from_name(const std::string& name);
const char* scenario_name(Scenario s);

// Parameter / equation dimension of the scenario's estimating function.
int scenario_dim(Scenario s);
EstimatingFunction scenario_ef(Scenario s);

// Difference theta_y0 - theta_x0 implied by the scenario's populations.
Vec true_difference(Scenario s);

// Draw one replicate dataset. Sample X is drawn first, then sample Y; for
// the Gini scenarios the raw incomes are paired and the pair counts are the
// effective sample sizes.
TwoSampleData scenario_draw(Scenario s, int m, int n, Rng& rng);

struct ScenarioSpec {
    Scenario name = Scenario::MeanNormal;
    int m = 0, n = 0;
    Vec true_pi;  // empty selects the scenario default
    std::vector<double> levels;
    std::vector<MethodId> methods;
    int replicates = 0;
    uint64_t seed = 0;
    int threads = 0;  // 0: TWOSEEL_THREADS env var, else hardware concurrency
};

struct CoverageCell {
    MethodId method = MethodId::OEL;
    double level = 0.0;
    long hits = 0;
    long valid = 0;
    long failed = 0;
    long flagged = 0;  // valid replicates that used a degraded evaluation

    double coverage() const { return valid > 0 ? static_cast<double>(hits) / valid : 0.0; }
    double mc_stderr() const {
        if (valid <= 0) return 0.0;
        const double c = coverage();
        return std::sqrt(c * (1.0 - c) / valid);
    }
};

struct CoverageReport {
    ScenarioSpec spec;
    std::vector<CoverageCell> cells;

    const CoverageCell& cell(MethodId method, double level) const;
};

// Monte Carlo coverage of the requested methods at the scenario's true
// difference. Replicate r uses the stream seed splitmix64_at(spec.seed, r),
// so the report is identical for any thread count.
CoverageReport run_coverage(const ScenarioSpec& spec);

// Table-layout CSV: one row per report, column groups per level with the
// methods in table order (oel, eel1, bel, eel2) restricted to those
// requested; coverage in percent to one decimal.
void write_coverage_csv(const std::vector<CoverageReport>& rows, std::ostream& os);

int resolve_thread_count(int requested, int replicates);

}  // namespace twoseel
