#include "twoseel/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace twoseel {

Scenario scenario_from_name(const std::string& name) {
    if (name == "example1") return Scenario::Example1;
    if (name == "example2") return Scenario::Example2;
    if (name == "example3") return Scenario::Example3;
    if (name == "example4") return Scenario::Example4;
    if (name == "mean_normal") return Scenario::MeanNormal;
    throw DomainError("unknown scenario '" + name +
                      "' (expected example1..example4 or mean_normal)");
}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Example1: return "example1";
        case Scenario::Example2: return "example2";
        case Scenario::Example3: return "example3";
        case Scenario::Example4: return "example4";
        case Scenario::MeanNormal: return "mean_normal";
    }
    return "?";
}

int scenario_dim(Scenario s) {
    switch (s) {
        case Scenario::Example1:
        case Scenario::Example2:
        case Scenario::MeanNormal: return 1;
        case Scenario::Example3:
        case Scenario::Example4: return 2;
    }
    return 0;
}

EstimatingFunction scenario_ef(Scenario s) {
    switch (s) {
        case Scenario::Example1:
        case Scenario::Example2: return gini_ef();
        case Scenario::Example3:
        case Scenario::Example4: return regression_ef(2);
        case Scenario::MeanNormal: return mean_ef(1);
    }
    throw DomainError("scenario_ef: bad scenario");
}

Vec true_difference(Scenario s) {
    switch (s) {
        case Scenario::Example1:
            // Gini(chi^2_1) - Gini(lognormal(0,1)) = 2/pi - erf(1/2)
            return {2.0 / M_PI - std::erf(0.5)};
        case Scenario::Example2:
            // Gini(Exp(1)) - Gini(Pareto(5)) = 1/2 - 1/9
            return {0.5 - 1.0 / 9.0};
        case Scenario::Example3:
        case Scenario::Example4:
            // slope/intercept difference beta_a - beta_b = (2,1) - (2,2)
            return {0.0, -1.0};
        case Scenario::MeanNormal: return {0.0};
    }
    throw DomainError("true_difference: bad scenario");
}

namespace {

Mat column(const Vec& v) {
    Mat m(static_cast<int>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
    return m;
}

// rows (1, x1, y) for y = b0 + b1 x1 + eps, x1 ~ U[0,30] redrawn per row
Mat regression_sample(int count, double b0, double b1, bool exp_errors, Rng& rng) {
    Mat out(count, 3);
    for (int i = 0; i < count; ++i) {
        const double x1 = draw(Dist::Uniform0_30, rng);
        const double eps = exp_errors ? draw(Dist::Exp1, rng) - 1.0 : rng.normal();
        out(i, 0) = 1.0;
        out(i, 1) = x1;
        out(i, 2) = b0 + b1 * x1 + eps;
    }
    return out;
}

}  // namespace

TwoSampleData scenario_draw(Scenario s, int m, int n, Rng& rng) {
    switch (s) {
        // For the Gini scenarios m and n are the effective (pair) sample
        // sizes, so 2m and 2n raw incomes are drawn; matching the coverage
        // tables requires this reading.
        case Scenario::Example1: {
            const Vec raw_x = sample(Dist::LogNormal01, 2 * m, rng);
            const Vec raw_y = sample(Dist::ChiSq1, 2 * n, rng);
            return TwoSampleData(gini_pairs(raw_x), gini_pairs(raw_y), 1);
        }
        case Scenario::Example2: {
            const Vec raw_x = sample(Dist::Pareto5, 2 * m, rng);
            const Vec raw_y = sample(Dist::Exp1, 2 * n, rng);
            return TwoSampleData(gini_pairs(raw_x), gini_pairs(raw_y), 1);
        }
        case Scenario::Example3:
            // X from model (b) with beta_b = (2,2); Y from model (a) with
            // beta_a = (2,1); both with standard normal errors
            return TwoSampleData(regression_sample(m, 2.0, 2.0, false, rng),
                                 regression_sample(n, 2.0, 1.0, false, rng), 2);
        case Scenario::Example4:
            // model (a) errors are centred Exp(1)
            return TwoSampleData(regression_sample(m, 2.0, 2.0, false, rng),
                                 regression_sample(n, 2.0, 1.0, true, rng), 2);
        case Scenario::MeanNormal:
            return TwoSampleData(column(sample(Dist::StdNormal, m, rng)),
                                 column(sample(Dist::StdNormal, n, rng)), 1);
    }
    throw DomainError("scenario_draw: bad scenario");
}

const CoverageCell& CoverageReport::cell(MethodId method, double level) const {
    for (const CoverageCell& c : cells)
        if (c.method == method && c.level == level) return c;
    throw std::out_of_range("CoverageReport: no such cell");
}

int resolve_thread_count(int requested, int replicates) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int t = requested;
    if (t <= 0) {
        t = hw;
        // TWOSEEL_THREADS caps the default pool
        if (const char* env = std::getenv("TWOSEEL_THREADS")) {
            const int cap = std::atoi(env);
            if (cap > 0) t = std::min(t, cap);
        }
    }
    return std::min(t, std::max(1, replicates));
}

CoverageReport run_coverage(const ScenarioSpec& spec_in) {
    ScenarioSpec spec = spec_in;
    if (spec.replicates < 100)
        throw DomainError("run_coverage: replicates must be >= 100");
    if (spec.m < 2 || spec.n < 2) throw DomainError("run_coverage: m and n must be >= 2");
    if (spec.levels.empty() || spec.methods.empty())
        throw DomainError("run_coverage: need at least one level and one method");
    for (double lv : spec.levels)
        if (!(lv > 0.5 && lv < 0.9999))
            throw DomainError("run_coverage: levels must lie in (0.5, 0.9999)");
    const int q = scenario_dim(spec.name);
    if (spec.true_pi.empty())
        spec.true_pi = true_difference(spec.name);
    else if (static_cast<int>(spec.true_pi.size()) != q)
        throw DomainError("run_coverage: true_pi dimension mismatch");

    Vec criticals(spec.levels.size());
    for (std::size_t i = 0; i < spec.levels.size(); ++i)
        criticals[i] = chisq_quantile(q, spec.levels[i]);
    const EstimatingFunction ef = scenario_ef(spec.name);

    const std::size_t n_methods = spec.methods.size();
    const std::size_t n_levels = spec.levels.size();
    const std::size_t n_cells = n_methods * n_levels;
    struct Counts {
        std::vector<long> hits, valid, failed, flagged;
        explicit Counts(std::size_t n) : hits(n, 0), valid(n, 0), failed(n, 0), flagged(n, 0) {}
    };

    const auto run_range = [&](int first, int last, Counts& counts) {
        for (int r = first; r < last; ++r) {
            Rng rng(splitmix64_at(spec.seed, static_cast<uint64_t>(r)));
            std::optional<Analysis> an;
            try {
                an.emplace(ef, scenario_draw(spec.name, spec.m, spec.n, rng));
            } catch (const std::exception&) {
                for (std::size_t c = 0; c < n_cells; ++c) ++counts.failed[c];
                continue;
            }
            // one statistic per method; OEL and BEL share the profile solve
            std::vector<std::optional<Analysis::StatValue>> stat(n_methods);
            std::optional<double> oel_value;
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                const MethodId method = spec.methods[mi];
                try {
                    if (method == MethodId::OEL || method == MethodId::BEL) {
                        if (!oel_value) oel_value = an->statistic(MethodId::OEL, spec.true_pi);
                        if (method == MethodId::OEL)
                            stat[mi] = Analysis::StatValue{*oel_value, false};
                        else
                            stat[mi] = Analysis::StatValue{*oel_value * an->bel_multiplier(),
                                                           an->bel_uncorrected()};
                    } else {
                        stat[mi] = an->statistic_with_flag(method, spec.true_pi);
                    }
                } catch (const std::exception&) {
                    stat[mi] = std::nullopt;
                }
            }
            for (std::size_t mi = 0; mi < n_methods; ++mi)
                for (std::size_t li = 0; li < n_levels; ++li) {
                    const std::size_t c = mi * n_levels + li;
                    if (!stat[mi]) {
                        ++counts.failed[c];
                        continue;
                    }
                    ++counts.valid[c];
                    if (stat[mi]->flagged) ++counts.flagged[c];
                    if (stat[mi]->value <= criticals[li]) ++counts.hits[c];
                }
        }
    };

    const int threads = resolve_thread_count(spec.threads, spec.replicates);
    std::vector<Counts> partial(threads, Counts(n_cells));
    if (threads == 1) {
        run_range(0, spec.replicates, partial[0]);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            const int first = static_cast<int>(static_cast<long>(spec.replicates) * t / threads);
            const int last =
                static_cast<int>(static_cast<long>(spec.replicates) * (t + 1) / threads);
            pool.emplace_back([&, first, last, t] { run_range(first, last, partial[t]); });
        }
        for (auto& th : pool) th.join();
    }

    CoverageReport report;
    report.spec = spec;
    for (std::size_t mi = 0; mi < n_methods; ++mi)
        for (std::size_t li = 0; li < n_levels; ++li) {
            CoverageCell cell;
            cell.method = spec.methods[mi];
            cell.level = spec.levels[li];
            for (const Counts& c : partial) {
                const std::size_t k = mi * n_levels + li;
                cell.hits += c.hits[k];
                cell.valid += c.valid[k];
                cell.failed += c.failed[k];
                cell.flagged += c.flagged[k];
            }
            report.cells.push_back(cell);
        }
    return report;
}

namespace {

std::string level_label(double level) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", level * 100.0);
    return buf;
}

}  // namespace

void write_coverage_csv(const std::vector<CoverageReport>& rows, std::ostream& os) {
    if (rows.empty()) return;
    const ScenarioSpec& spec0 = rows.front().spec;
    std::vector<MethodId> methods;
    for (MethodId m : kTableOrder)
        for (MethodId requested : spec0.methods)
            if (m == requested) methods.push_back(m);

    os << "m,n";
    for (double level : spec0.levels)
        for (MethodId m : methods) os << ',' << method_name(m) << '_' << level_label(level);
    os << '\n';

    char buf[32];
    for (const CoverageReport& r : rows) {
        os << r.spec.m << ',' << r.spec.n;
        for (double level : r.spec.levels)
            for (MethodId m : methods) {
                const CoverageCell& c = r.cell(m, level);
                std::snprintf(buf, sizeof buf, "%.1f", 100.0 * c.coverage());
                os << ',' << buf;
            }
        os << '\n';
    }
}

}  // namespace twoseel
