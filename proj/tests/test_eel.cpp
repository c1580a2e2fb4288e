#include <doctest.h>

#include <random>

#include "twoseel/eel.hpp"
#include "twoseel/rng.hpp"

using namespace twoseel;

namespace {

Mat column(const Vec& v) {
    Mat m(static_cast<int>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
    return m;
}

const Vec kX = {0.1, 0.5, 0.9, 1.3};
const Vec kY = {1.0, 1.4, 2.2, 2.6};

Profiler mean_profiler() { return Profiler(mean_ef(1), TwoSampleData(column(kX), column(kY), 1)); }

// Independent scalar inversion: a dense grid over the feasible ray segment
// followed by plain bisection on phi(t) = t * gamma(N, l(t)), every l
// evaluated by a fresh profile solve.
double oracle_inverse_t(const Profiler& prof, double pi, const MappingConfig& cfg) {
    const double center = prof.mele_pi()[0];
    const double diff = pi - center;
    const int total = prof.data().total();
    const auto phi = [&](double t) {
        const ProfileSolution s = prof.loglik({center + t * diff});
        if (s.status != DomainStatus::Interior) return std::numeric_limits<double>::quiet_NaN();
        return t * expansion_factor(cfg, total, s.loglik);
    };
    const int grid = 2048;
    double prev_t = 0.0, prev_phi = 0.0;
    double lo = -1.0, hi = -1.0;
    for (int k = 1; k <= grid; ++k) {
        const double t = static_cast<double>(k) / grid;
        const double p = phi(t);
        if (std::isnan(p)) break;  // left the domain
        if ((prev_phi - 1.0) * (p - 1.0) <= 0.0) {
            lo = prev_t;
            hi = t;
        }
        prev_t = t;
        prev_phi = p;
    }
    REQUIRE(lo >= 0.0);
    double flo = phi(lo) - 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = phi(mid) - 1.0;
        if (flo * f <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = f;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("expansion factors") {
    CHECK(gamma1(17, 0.0) == 1.0);
    CHECK(gamma1(40, 2.0) == doctest::Approx(1.025).epsilon(1e-15));
    CHECK(gamma1(40, 3.0) > gamma1(40, 2.0));
    CHECK(gamma2(50, 0.0, 2.0, 0.5) == 1.0);
    CHECK(gamma2(50, 1.0, 2.0, 0.37) == doctest::Approx(1.02).epsilon(1e-15));
    CHECK(gamma2(50, 4.0, 2.0, 0.5) == doctest::Approx(1.04).epsilon(1e-15));
    CHECK_THROWS_AS(MappingConfig::second_order(1.0, 1.5), DomainError);
}

TEST_CASE("forward map: fixed point and ray geometry") {
    const Profiler prof = mean_profiler();
    const MappingConfig cfg = MappingConfig::first_order();
    SUBCASE("unique fixed point at the MELE, exactly") {
        const Vec out = forward_map(prof, prof.mele_pi(), cfg);
        CHECK(out[0] == prof.mele_pi()[0]);
    }
    SUBCASE("image is the MELE-anchored expansion by gamma(l)") {
        const double center = prof.mele_pi()[0];
        for (double off : {-0.5, 0.3, 0.9}) {
            const Vec pi = {center + off};
            const ProfileSolution sol = prof.loglik(pi);
            REQUIRE(sol.status == DomainStatus::Interior);
            const double g = gamma1(prof.data().total(), sol.loglik);
            const Vec out = forward_map(prof, pi, cfg);
            CHECK(out[0] == doctest::Approx(center + g * off).epsilon(1e-12));
            // strictly on the far side of pi from the centre
            CHECK((out[0] - pi[0]) * off >= 0.0);
        }
    }
    SUBCASE("exterior input is rejected") {
        CHECK_THROWS_AS(forward_map(prof, {5.0}, cfg), ExteriorInput);
    }
}

TEST_CASE("inverse map: fixed point, round trip, collinearity") {
    const Profiler prof = mean_profiler();
    const double center = prof.mele_pi()[0];
    for (const MappingConfig& cfg :
         {MappingConfig::first_order(), MappingConfig::second_order(1.4, 0.5)}) {
        SUBCASE("trivial inversion at the MELE") {
            const RayInversion inv = inverse_map(prof, prof.mele_pi(), cfg);
            CHECK(inv.t_star == 0.0);
            CHECK(inv.pi_prime[0] == center);
            CHECK(inv.l_at_prime == 0.0);
        }
        for (double pi : {center + 0.7, center - 0.9, 2.7, 4.0, -0.5}) {
            CAPTURE(pi);
            const RayInversion inv = inverse_map(prof, {pi}, cfg);
            REQUIRE(!inv.no_preimage);
            CHECK(inv.t_star >= 0.0);
            CHECK(inv.t_star <= 1.0);
            // preimage on the segment [MELE, pi]
            CHECK(inv.pi_prime[0] ==
                  doctest::Approx(center + inv.t_star * (pi - center)).epsilon(1e-14));
            CHECK(inv.residual < 1e-8 * (1.0 + std::fabs(pi - center)));
            // round trip through the forward map
            const Vec back = forward_map(prof, inv.pi_prime, cfg);
            CHECK(std::fabs(back[0] - pi) < 1e-8 * (1.0 + std::fabs(pi)));
        }
    }
}

TEST_CASE("inverse map agrees with the high-resolution scalar oracle") {
    const Profiler prof = mean_profiler();
    const MappingConfig cfg = MappingConfig::first_order();
    const double center = prof.mele_pi()[0];
    for (double pi : {center + 0.8, center - 0.8, 3.0}) {
        CAPTURE(pi);
        const double t_oracle = oracle_inverse_t(prof, pi, cfg);
        const RayInversion inv = inverse_map(prof, {pi}, cfg);
        const double prime_oracle = center + t_oracle * (pi - center);
        CHECK(std::fabs(inv.pi_prime[0] - prime_oracle) < 1e-6);
    }
}

TEST_CASE("extended loglik: zero at the MELE, finite everywhere, below OEL inside") {
    const Profiler prof = mean_profiler();
    const MappingConfig cfg = MappingConfig::first_order();
    CHECK(eel_loglik(prof, prof.mele_pi(), cfg) == 0.0);

    SUBCASE("finite outside the OEL domain") {
        for (double pi : {2.6, 3.5, 10.0, -0.5, -3.0}) {
            REQUIRE(prof.status({pi}) == DomainStatus::Exterior);
            const double l = eel_loglik(prof, {pi}, cfg);
            CHECK(std::isfinite(l));
            CHECK(l >= 0.0);
        }
    }
    SUBCASE("no larger than OEL on interior grid points") {
        const double center = prof.mele_pi()[0];
        for (double off : {-1.0, -0.5, -0.2, 0.3, 0.7, 1.2}) {
            const ProfileSolution sol = prof.loglik({center + off});
            REQUIRE(sol.status == DomainStatus::Interior);
            CHECK(eel_loglik(prof, {center + off}, cfg) <= sol.loglik + 1e-10);
        }
    }
}

TEST_CASE("negative Bartlett factor contracts the map and flags no-preimage rays") {
    const Profiler prof = mean_profiler();
    const MappingConfig cfg = MappingConfig::second_order(-3.0, 0.5);
    const double center = prof.mele_pi()[0];
    const Vec pi = {center + 0.4};  // interior, moderate l
    const ProfileSolution sol = prof.loglik(pi);
    REQUIRE(sol.status == DomainStatus::Interior);
    REQUIRE(gamma2(prof.data().total(), sol.loglik, -3.0, 0.5) < 1.0);
    const RayInversion inv = inverse_map(prof, pi, cfg);
    CHECK(inv.no_preimage);
    CHECK(inv.t_star == doctest::Approx(1.0));  // boundary-limit preimage: pi itself
    CHECK(inv.l_at_prime == doctest::Approx(sol.loglik).epsilon(1e-9));
}

TEST_CASE("ray monotonicity diagnostic") {
    SUBCASE("standard normal mean data shows no violations") {
        std::mt19937 gen(1234);
        std::normal_distribution<double> nd;
        Vec x(40), y(40);
        for (double& v : x) v = nd(gen);
        for (double& v : y) v = nd(gen);
        const Profiler prof(mean_ef(1), TwoSampleData(column(x), column(y), 1));
        const MonotonicityReport rep = ray_monotonicity_diagnostic(prof, 4, 12);
        CHECK(rep.total_violations == 0);
        CHECK(rep.rays.size() == 4);
        for (const RayDiagnostic& ray : rep.rays) {
            CHECK(ray.boundary_radius > 0.0);
            CHECK(!ray.l_values.empty());
        }
        CHECK(!rep.newton_iters.empty());
    }
    SUBCASE("degenerate diagnostic runs") {
        const Profiler prof = mean_profiler();
        const MonotonicityReport rep = ray_monotonicity_diagnostic(prof, 1, 2);
        CHECK(rep.rays.size() == 1);
        CHECK(rep.total_violations >= 0);
    }
}

TEST_CASE("first-order extension agrees with the profile statistic asymptotically") {
    // m = n = 400 standard normal mean data: the two statistics at the true
    // difference differ by O(1/n) and should be close in most replicates
    int close = 0, valid = 0;
    for (int r = 0; r < 500; ++r) {
        Rng rng(splitmix64_at(0x11C0DEull, static_cast<uint64_t>(r)));
        Vec x(400), y(400);
        for (double& v : x) v = rng.normal();
        for (double& v : y) v = rng.normal();
        const Profiler prof(mean_ef(1), TwoSampleData(column(x), column(y), 1));
        const ProfileSolution sol = prof.loglik({0.0});
        if (sol.status != DomainStatus::Interior) continue;
        ++valid;
        const double l1 = eel_loglik(prof, {0.0}, MappingConfig::first_order());
        if (std::fabs(l1 - sol.loglik) < 0.05) ++close;
    }
    CHECK(valid >= 495);
    CHECK(close >= valid * 95 / 100);
}

TEST_CASE("free wrappers rebuild the profiler") {
    const EstimatingFunction ef = mean_ef(1);
    const TwoSampleData data(column(kX), column(kY), 1);
    const Vec pt = mele_diff(ef, data);
    const MappingConfig cfg = MappingConfig::first_order();
    CHECK(forward_map(ef, data, pt, cfg) == pt);
    CHECK(inverse_map(ef, data, {pt[0] + 0.5}, cfg).t_star > 0.0);
    CHECK(eel_loglik(ef, data, pt, cfg) == 0.0);
    CHECK(ray_monotonicity_diagnostic(ef, data, 2, 3).rays.size() == 2);
}

TEST_CASE("diagnostic on gini data reports violation counts and boundaries") {
    Rng rng(0x6117ull);
    Vec rx(40), ry(40);
    for (double& v : rx) v = std::exp(rng.normal());
    for (double& v : ry) { const double z = rng.normal(); v = z * z; }
    const Profiler prof(gini_ef(), TwoSampleData(gini_pairs(rx), gini_pairs(ry), 1));
    const MonotonicityReport rep = ray_monotonicity_diagnostic(prof, 8, 16);
    CHECK(rep.rays.size() == 8);
    for (const RayDiagnostic& ray : rep.rays) {
        CHECK(ray.violations >= 0);  // count logged, no ground truth asserted
        CHECK(ray.t_max() > 0.0);
        CHECK(ray.t_max() <= 1.0);
    }
}
