#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "twoseel/oel.hpp"

using namespace twoseel;

namespace {

Mat column(const Vec& v) {
    Mat m(static_cast<int>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
    return m;
}

const Vec kX = {0.1, 0.5, 0.9, 1.3};
const Vec kY = {1.0, 1.4, 2.2, 2.6};

TwoSampleData mean_fixture() { return TwoSampleData(column(kX), column(kY), 1); }

void check_interior_invariants(const EstimatingFunction& ef, const TwoSampleData& data,
                               const ProfileSolution& sol) {
    REQUIRE(sol.status == DomainStatus::Interior);
    double sx = 0.0, sy = 0.0;
    for (double w : sol.weights_x) {
        CHECK(w > 0.0);
        sx += w;
    }
    for (double w : sol.weights_y) {
        CHECK(w > 0.0);
        sy += w;
    }
    CHECK(std::fabs(sx - 1.0) < 1e-8);
    CHECK(std::fabs(sy - 1.0) < 1e-8);
    Vec acc(ef.q, 0.0), g(ef.q);
    for (int i = 0; i < data.m(); ++i) {
        ef.eval(data.x().row(i), sol.theta_x, g);
        for (int t = 0; t < ef.q; ++t) acc[t] += sol.weights_x[i] * g[t];
    }
    CHECK(inf_norm(acc) < 1e-7);
    acc.assign(ef.q, 0.0);
    for (int j = 0; j < data.n(); ++j) {
        ef.eval(data.y().row(j), sol.theta_y, g);
        for (int t = 0; t < ef.q; ++t) acc[t] += sol.weights_y[j] * g[t];
    }
    CHECK(inf_norm(acc) < 1e-7);
    CHECK(sol.loglik >= -1e-9);
}

}  // namespace

TEST_CASE("mele closed forms") {
    SUBCASE("sample mean") {
        CHECK(mele(mean_ef(1), column({1.0, 2.0, 3.0}))[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("gini: sum(T - Z) / sum(T)") {
        Mat pairs(2, 2);
        pairs(0, 0) = 2.0;
        pairs(0, 1) = 1.0;
        pairs(1, 0) = 3.0;
        pairs(1, 1) = 2.0;
        CHECK(mele(gini_ef(), pairs)[0] == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("regression on collinear data recovers the exact line") {
        Mat d(3, 3);
        const double xs[3] = {0.0, 1.0, 2.0};
        for (int i = 0; i < 3; ++i) {
            d(i, 0) = 1.0;
            d(i, 1) = xs[i];
            d(i, 2) = 1.0 + 2.0 * xs[i];
        }
        const Vec beta = mele(regression_ef(2), d);
        CHECK(beta[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(beta[1] == doctest::Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("mele_diff simple cases") {
    SUBCASE("difference of means") {
        const TwoSampleData d(column({0.5, 1.0, 1.5}), column({3.5, 4.0, 4.5}), 1);
        CHECK(mele_diff(mean_ef(1), d)[0] == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("identical samples") {
        const TwoSampleData d(column(kX), column(kX), 1);
        CHECK(mele_diff(mean_ef(1), d)[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("profile log-likelihood vanishes at the MELE") {
    const Profiler prof(mean_ef(1), mean_fixture());
    const ProfileSolution sol = prof.loglik(prof.mele_pi());
    CHECK(sol.status == DomainStatus::Interior);
    CHECK(sol.loglik == 0.0);
    CHECK(inf_norm(sol.lambda) == 0.0);
    for (double w : sol.weights_x) CHECK(w == doctest::Approx(0.25));
    // strictly positive away from the MELE
    for (double off : {-0.6, -0.2, 0.2, 0.6}) {
        const ProfileSolution s = prof.loglik({prof.mele_pi()[0] + off});
        CHECK(s.status == DomainStatus::Interior);
        CHECK(s.loglik > 0.0);
    }
}

TEST_CASE("interior solutions satisfy the weight and constraint identities") {
    const EstimatingFunction ef = mean_ef(1);
    const TwoSampleData data = mean_fixture();
    const Profiler prof(ef, data);
    for (double pi : {0.3, 0.8, 1.1, 1.5, 2.0}) {
        const ProfileSolution sol = prof.loglik({pi});
        check_interior_invariants(ef, data, sol);
    }
}

TEST_CASE("dual solution matches the brute-force primal oracle on an interior grid") {
    const Profiler prof(mean_ef(1), mean_fixture());
    // hull difference is (-0.3, 2.5); scan well inside
    for (int k = 0; k <= 10; ++k) {
        const double pi = 0.1 + 0.2 * k;
        const ProfileSolution sol = prof.loglik({pi});
        REQUIRE(sol.status == DomainStatus::Interior);
        const double oracle = oracles::two_sample_mean_el_bruteforce(kX, kY, pi);
        CHECK(std::fabs(sol.loglik - oracle) < 1e-5);
    }
}

TEST_CASE("domain classification in the mean case") {
    const Profiler prof(mean_ef(1), mean_fixture());
    SUBCASE("MELE is interior") { CHECK(prof.status(prof.mele_pi()) == DomainStatus::Interior); }
    SUBCASE("beyond the hull difference is exterior") {
        CHECK(prof.status({2.6}) == DomainStatus::Exterior);
        CHECK(prof.status({5.0}) == DomainStatus::Exterior);
        CHECK(prof.status({50.0}) == DomainStatus::Exterior);
        CHECK(prof.status({-0.4}) == DomainStatus::Exterior);
        const ProfileSolution sol = prof.loglik({3.0});
        CHECK(sol.loglik == std::numeric_limits<double>::infinity());
    }
    SUBCASE("exterior status is reproducible") {
        CHECK(prof.status({2.6}) == DomainStatus::Exterior);
        CHECK(prof.status({2.6}) == DomainStatus::Exterior);
    }
    SUBCASE("just inside the hull difference stays interior with a large loglik") {
        const ProfileSolution sol = prof.loglik({2.5 - 1e-3});
        CHECK(sol.status == DomainStatus::Interior);
        CHECK(sol.loglik > 10.0);
        CHECK(std::isfinite(sol.loglik));
        const double oracle = oracles::two_sample_mean_el_bruteforce(kX, kY, 2.5 - 1e-3);
        CHECK(std::isfinite(oracle));
        CHECK(std::fabs(sol.loglik - oracle) < 1e-4 * oracle);
    }
}

TEST_CASE("warm and cold starts agree") {
    const Profiler prof(mean_ef(1), mean_fixture());
    const ProfileSolution warm_source = prof.loglik({1.4});
    for (double pi : {1.5, 1.0, 1.9}) {
        const ProfileSolution cold = prof.loglik({pi});
        const ProfileSolution warm = prof.loglik({pi}, &warm_source);
        REQUIRE(cold.status == DomainStatus::Interior);
        REQUIRE(warm.status == DomainStatus::Interior);
        CHECK(std::fabs(cold.loglik - warm.loglik) < 1e-8);
    }
}

TEST_CASE("profile solves on gini and regression data") {
    std::mt19937 gen(42);
    SUBCASE("gini pairs") {
        std::exponential_distribution<double> ed(1.0);
        Vec rx(30), ry(24);
        for (double& v : rx) v = ed(gen);
        for (double& v : ry) v = ed(gen);
        const TwoSampleData data(gini_pairs(rx), gini_pairs(ry), 1);
        const EstimatingFunction ef = gini_ef();
        const Profiler prof(ef, data);
        const ProfileSolution at_mele = prof.loglik(prof.mele_pi());
        CHECK(at_mele.loglik == 0.0);
        const ProfileSolution off = prof.loglik({prof.mele_pi()[0] + 0.05});
        check_interior_invariants(ef, data, off);
        CHECK(off.loglik > 0.0);
    }
    SUBCASE("regression") {
        std::normal_distribution<double> nd;
        std::uniform_real_distribution<double> ud(0.0, 30.0);
        const auto draw_sample = [&](int count, double b0, double b1) {
            Mat s(count, 3);
            for (int i = 0; i < count; ++i) {
                const double x1 = ud(gen);
                s(i, 0) = 1.0;
                s(i, 1) = x1;
                s(i, 2) = b0 + b1 * x1 + nd(gen);
            }
            return s;
        };
        const TwoSampleData data(draw_sample(25, 2.0, 2.0), draw_sample(25, 2.0, 1.0), 2);
        const EstimatingFunction ef = regression_ef(2);
        const Profiler prof(ef, data);
        Vec pi = prof.mele_pi();
        pi[0] += 0.3;
        pi[1] -= 0.02;
        const ProfileSolution sol = prof.loglik(pi);
        check_interior_invariants(ef, data, sol);
    }
}

TEST_CASE("chi-square calibration smoke check at the true difference") {
    // small version of the asymptotic calibration; the full 2000-replicate
    // check lives in the acceptance suite
    std::mt19937 gen(515);
    std::normal_distribution<double> nd;
    double sum = 0.0;
    const int reps = 200, m = 120, n = 120;
    for (int r = 0; r < reps; ++r) {
        Vec x(m), y(n);
        for (double& v : x) v = nd(gen);
        for (double& v : y) v = nd(gen);
        const Profiler prof(mean_ef(1), TwoSampleData(column(x), column(y), 1));
        const ProfileSolution sol = prof.loglik({0.0});
        REQUIRE(sol.status == DomainStatus::Interior);
        sum += sol.loglik;
    }
    const double mean_l = sum / reps;  // ~chi^2_1 mean 1, se ~ sqrt(2/200) ~ 0.1
    CHECK(mean_l > 0.7);
    CHECK(mean_l < 1.3);
}

TEST_CASE("mele_diff on gini pairs uses the per-sample closed forms") {
    Mat px(2, 2), py(2, 2);
    px(0, 0) = 2.0; px(0, 1) = 1.0;  // sum(T - Z)/sum(T) = 0.4
    px(1, 0) = 3.0; px(1, 1) = 2.0;
    py(0, 0) = 2.0; py(0, 1) = 1.0;  // 0.5
    py(1, 0) = 2.0; py(1, 1) = 1.0;
    const TwoSampleData data(px, py, 1);
    CHECK(mele_diff(gini_ef(), data)[0] == doctest::Approx(0.1).epsilon(1e-12));
}
