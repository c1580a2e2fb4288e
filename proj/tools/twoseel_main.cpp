// twoseel: two-sample empirical likelihood inference from the command line.
//
//   twoseel infer    --x X.csv --y Y.csv --ef <mean|gini|regression> ...
//   twoseel simulate --config scenario.json [--out table.csv]
//   twoseel diagnose --x X.csv --y Y.csv --ef <id> [--rays N] [--points K]
//
// Exit codes: 0 success, 2 input/data error, 3 solver failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "twoseel/csv.hpp"
#include "twoseel/simulate.hpp"

using nlohmann::json;
using namespace twoseel;

namespace {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<MethodId> parse_methods(const std::string& s) {
    std::vector<MethodId> out;
    for (const std::string& name : split_list(s)) out.push_back(method_from_name(name));
    if (out.empty()) throw InputError("no methods given");
    return out;
}

std::vector<double> parse_levels(const std::string& s) {
    std::vector<double> out;
    for (const std::string& item : split_list(s)) {
        const double v = std::stod(item);
        if (!(v > 0.5 && v < 0.9999))
            throw InputError("level " + item + " outside (0.5, 0.9999)");
        out.push_back(v);
    }
    if (out.empty()) throw InputError("no levels given");
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << content;
}

uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

// ---- infer ----------------------------------------------------------------

struct EfChoice {
    EstimatingFunction ef;
    bool gini = false;
};

EfChoice make_ef(const std::string& id, const Mat& x_csv) {
    EfChoice out;
    if (id == "mean") {
        out.ef = mean_ef(x_csv.cols());
    } else if (id == "gini") {
        if (x_csv.cols() != 1) throw InputError("gini expects a single income column");
        out.ef = gini_ef();
        out.gini = true;
    } else if (id == "regression") {
        if (x_csv.cols() < 2)
            throw InputError("regression expects columns x1,...,xk,y (at least 2)");
        out.ef = regression_ef(x_csv.cols());  // intercept + k predictors
    } else {
        throw InputError("unknown estimating function '" + id + "'");
    }
    return out;
}

Vec column_vec(const Mat& m) {
    Vec v(m.rows());
    for (int i = 0; i < m.rows(); ++i) v[i] = m(i, 0);
    return v;
}

// prepend the intercept column: CSV rows (x1..xk, y) -> (1, x1..xk, y)
Mat with_intercept(const Mat& m) {
    Mat out(m.rows(), m.cols() + 1);
    for (int i = 0; i < m.rows(); ++i) {
        out(i, 0) = 1.0;
        for (int j = 0; j < m.cols(); ++j) out(i, j + 1) = m(i, j);
    }
    return out;
}

int run_infer(const std::string& x_path, const std::string& y_path, const std::string& ef_id,
              const std::string& methods_str, const std::string& levels_str,
              const std::string& out_path, const std::string& format, int rays) {
    const Mat x_csv = read_csv_file(x_path);
    const Mat y_csv = read_csv_file(y_path);
    if (x_csv.cols() != y_csv.cols()) throw InputError("X and Y have different column counts");

    const EfChoice choice = make_ef(ef_id, x_csv);
    const std::vector<MethodId> methods = parse_methods(methods_str);
    const std::vector<double> levels = parse_levels(levels_str);

    Mat x = x_csv, y = y_csv;
    if (choice.gini) {
        x = gini_pairs(column_vec(x_csv));
        y = gini_pairs(column_vec(y_csv));
    } else if (ef_id == "regression") {
        x = with_intercept(x_csv);
        y = with_intercept(y_csv);
    }
    if (x.cols() != choice.ef.d) throw InputError("column count does not match estimating function");

    Analysis an(choice.ef, TwoSampleData(std::move(x), std::move(y), choice.ef.q));
    const int p = choice.ef.p;

    json doc;
    doc["ef"] = ef_id;
    doc["p"] = p;
    doc["m"] = an.profiler().data().m();
    doc["n"] = an.profiler().data().n();
    doc["pi_tilde"] = an.pi_tilde();
    doc["eta_hat"] = an.bartlett().eta;
    doc["bel_uncorrected"] = an.bel_uncorrected();

    std::ostringstream csv;
    csv.precision(12);
    if (p == 1) {
        doc["intervals"] = json::array();
        csv << "method,level,lower,upper,critical,lower_at_bound,upper_at_bound\n";
        for (MethodId m : methods)
            for (double level : levels) {
                const ConfidenceInterval ci = an.confidence_interval(m, level);
                doc["intervals"].push_back({{"method", method_name(m)},
                                            {"level", level},
                                            {"lower", ci.lower},
                                            {"upper", ci.upper},
                                            {"critical", ci.critical},
                                            {"lower_at_bound", ci.lower_at_bound},
                                            {"upper_at_bound", ci.upper_at_bound}});
                csv << method_name(m) << ',' << level << ',' << ci.lower << ',' << ci.upper << ','
                    << ci.critical << ',' << ci.lower_at_bound << ',' << ci.upper_at_bound << '\n';
            }
    } else if (p == 2) {
        doc["contours"] = json::array();
        csv << "method,level,vertex,pi1,pi2\n";
        for (MethodId m : methods)
            for (double level : levels) {
                const RegionContour rc = an.region_contour(m, level, rays);
                json verts = json::array();
                for (std::size_t k = 0; k < rc.vertices.size(); ++k) {
                    verts.push_back({rc.vertices[k][0], rc.vertices[k][1]});
                    csv << method_name(m) << ',' << level << ',' << k << ',' << rc.vertices[k][0]
                        << ',' << rc.vertices[k][1] << '\n';
                }
                doc["contours"].push_back({{"method", method_name(m)},
                                           {"level", level},
                                           {"failed_rays", rc.failed_rays},
                                           {"vertices", verts}});
            }
    } else {
        throw InputError("inference output supports p == 1 and p == 2 only");
    }

    write_output(out_path, format == "csv" ? csv.str() : doc.dump(2) + "\n");
    return 0;
}

// ---- simulate ---------------------------------------------------------------

int run_simulate(const std::string& config_path, const std::string& out_path) {
    std::ifstream f(config_path);
    if (!f) throw InputError("cannot open config " + config_path);
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::parse_error& e) {
        throw InputError("config parse error: " + std::string(e.what()));
    }

    ScenarioSpec base;
    base.name = scenario_from_name(cfg.at("scenario").get<std::string>());
    base.replicates = cfg.value("replicates", 2000);
    base.levels = cfg.value("levels", std::vector<double>{0.90, 0.95, 0.99});
    const std::vector<std::string> method_names =
        cfg.value("methods", std::vector<std::string>{"oel", "eel1", "bel", "eel2"});
    for (const std::string& mn : method_names) base.methods.push_back(method_from_name(mn));
    if (cfg.contains("true_pi")) base.true_pi = cfg.at("true_pi").get<Vec>();
    if (cfg.contains("eta_estimator") && cfg.at("eta_estimator").get<std::string>() != "plugin")
        throw InputError("eta_estimator: only 'plugin' is implemented");

    bool seeded = cfg.contains("seed");
    base.seed = seeded ? cfg.at("seed").get<uint64_t>() : entropy_seed();

    std::vector<std::array<int, 2>> sizes;
    if (cfg.contains("sizes")) {
        for (const auto& pair : cfg.at("sizes"))
            sizes.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
    } else {
        sizes.push_back({cfg.at("m").get<int>(), cfg.at("n").get<int>()});
    }

    std::vector<CoverageReport> rows;
    json sidecar;
    sidecar["scenario"] = scenario_name(base.name);
    sidecar["replicates"] = base.replicates;
    sidecar["seed"] = base.seed;
    sidecar["seed_was_generated"] = !seeded;
    sidecar["levels"] = base.levels;
    sidecar["methods"] = method_names;
    sidecar["eta_estimator"] = "plugin";
    sidecar["rows"] = json::array();
    for (std::size_t row = 0; row < sizes.size(); ++row) {
        ScenarioSpec spec = base;
        spec.m = sizes[row][0];
        spec.n = sizes[row][1];
        spec.seed = sizes.size() == 1 ? base.seed : splitmix64_at(base.seed, 1000003 + row);
        rows.push_back(run_coverage(spec));
        json jrow;
        jrow["m"] = spec.m;
        jrow["n"] = spec.n;
        jrow["row_seed"] = spec.seed;
        jrow["cells"] = json::array();
        for (const CoverageCell& c : rows.back().cells)
            jrow["cells"].push_back({{"method", method_name(c.method)},
                                     {"level", c.level},
                                     {"hits", c.hits},
                                     {"valid", c.valid},
                                     {"failed", c.failed},
                                     {"flagged", c.flagged},
                                     {"coverage", c.coverage()},
                                     {"mc_stderr", c.mc_stderr()}});
        sidecar["rows"].push_back(std::move(jrow));
    }

    std::ostringstream csv;
    write_coverage_csv(rows, csv);
    write_output(out_path, csv.str());
    if (!out_path.empty()) {
        std::ofstream side(out_path + ".json", std::ios::binary);
        if (!side) throw InputError("cannot write " + out_path + ".json");
        side << sidecar.dump(2) << "\n";
    } else {
        std::cerr << sidecar.dump(2) << "\n";
    }
    return 0;
}

// ---- diagnose ---------------------------------------------------------------

int run_diagnose(const std::string& x_path, const std::string& y_path, const std::string& ef_id,
                 int rays, int points, const std::string& out_path) {
    const Mat x_csv = read_csv_file(x_path);
    const Mat y_csv = read_csv_file(y_path);
    const EfChoice choice = make_ef(ef_id, x_csv);
    Mat x = x_csv, y = y_csv;
    if (choice.gini) {
        x = gini_pairs(column_vec(x_csv));
        y = gini_pairs(column_vec(y_csv));
    } else if (ef_id == "regression") {
        x = with_intercept(x_csv);
        y = with_intercept(y_csv);
    }
    Profiler prof(choice.ef, TwoSampleData(std::move(x), std::move(y), choice.ef.q));
    const MonotonicityReport report = ray_monotonicity_diagnostic(prof, rays, points);

    json doc;
    doc["ef"] = ef_id;
    doc["pi_tilde"] = prof.mele_pi();
    doc["total_violations"] = report.total_violations;
    doc["rays"] = json::array();
    for (const RayDiagnostic& ray : report.rays)
        doc["rays"].push_back({{"direction", ray.direction},
                               {"boundary_radius", ray.boundary_radius},
                               {"t_max", ray.t_max()},
                               {"radii", ray.radii},
                               {"l_values", ray.l_values},
                               {"violations", ray.violations}});
    json hist = json::object();
    for (int iters : report.newton_iters) {
        const std::string key = std::to_string(iters);
        hist[key] = hist.value(key, 0) + 1;
    }
    doc["newton_iters_histogram"] = hist;
    write_output(out_path, doc.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-sample empirical likelihood inference (OEL, BEL, EEL1, EEL2)"};
    app.require_subcommand(1);

    std::string x_path, y_path, ef_id = "mean", methods = "oel,eel1,bel,eel2";
    std::string levels = "0.95", out_path, format = "json", config_path;
    int rays = 64, diag_rays = 8, points = 16;

    CLI::App* infer = app.add_subcommand("infer", "confidence intervals/regions from CSV samples");
    infer->add_option("--x", x_path, "CSV with the X sample")->required();
    infer->add_option("--y", y_path, "CSV with the Y sample")->required();
    infer->add_option("--ef", ef_id, "estimating function: mean, gini or regression");
    infer->add_option("--methods", methods, "comma-separated subset of oel,bel,eel1,eel2");
    infer->add_option("--levels", levels, "comma-separated confidence levels in (0.5, 0.9999)");
    infer->add_option("--out", out_path, "output path (default stdout)");
    infer->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    infer->add_option("--rays", rays, "contour rays when p == 2");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo coverage from a JSON config");
    simulate->add_option("--config", config_path, "scenario config JSON")->required();
    simulate->add_option("--out", out_path, "CSV output path; sidecar written to <out>.json");

    CLI::App* diagnose = app.add_subcommand("diagnose", "ray monotonicity / solver diagnostics");
    diagnose->add_option("--x", x_path, "CSV with the X sample")->required();
    diagnose->add_option("--y", y_path, "CSV with the Y sample")->required();
    diagnose->add_option("--ef", ef_id, "estimating function id");
    diagnose->add_option("--rays", diag_rays, "number of rays");
    diagnose->add_option("--points", points, "points per ray");
    diagnose->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(infer))
            return run_infer(x_path, y_path, ef_id, methods, levels, out_path, format, rays);
        if (app.got_subcommand(simulate)) return run_simulate(config_path, out_path);
        if (app.got_subcommand(diagnose))
            return run_diagnose(x_path, y_path, ef_id, diag_rays, points, out_path);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
