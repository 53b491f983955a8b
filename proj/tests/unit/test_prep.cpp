#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "resmix/errors.hpp"
#include "resmix/prep.hpp"
#include "resmix/rng.hpp"
#include "../support/generators.hpp"

using namespace resmix;

TEST_CASE("normalize produces zero mean and unit sample std") {
    const auto ts = testsup::white_noise(7, 1000);
    const auto norm = prep::normalize(ts);
    double mean = 0.0;
    for (double v : norm.samples) mean += v;
    mean /= 1000.0;
    double ssq = 0.0;
    for (double v : norm.samples) ssq += (v - mean) * (v - mean);
    const double sd = std::sqrt(ssq / 999.0);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm.dt == ts.dt);
}

TEST_CASE("normalize rejects constant input") {
    const auto ts = testsup::series_of(std::vector<double>(100, 3.25));
    CHECK_THROWS_AS(prep::normalize(ts), DegenerateInputError);
}

// Reference values computed with an established statistics package on the
// identical generator streams (constant-only regression, AIC lag choice).
TEST_CASE("unit-root test matches the reference implementation") {
    SUBCASE("white noise, seed 42") {
        const auto r = prep::adf_test(testsup::white_noise(42, 500));
        CHECK(r.adf_statistic == doctest::Approx(-6.2041685972631).epsilon(1e-9));
        CHECK(r.p_value == doctest::Approx(5.71110389538202e-08).epsilon(1e-6));
        CHECK(r.lags_used == 9);
        CHECK(r.reject_unit_root);
    }
    SUBCASE("random walk, seed 43") {
        resmix::GaussianRng rng(43);
        std::vector<double> x(500);
        double acc = 0.0;
        for (auto& v : x) {
            acc += rng.normal();
            v = acc;
        }
        const auto r = prep::adf_test(testsup::series_of(std::move(x)));
        CHECK(r.adf_statistic == doctest::Approx(-1.91832253528456).epsilon(1e-9));
        CHECK(r.p_value == doctest::Approx(0.323491309102469).epsilon(1e-6));
        CHECK(r.lags_used == 0);
        CHECK_FALSE(r.reject_unit_root);
    }
    SUBCASE("AR(0.5), seed 44") {
        resmix::GaussianRng rng(44);
        std::vector<double> x(500);
        double prev = 0.0;
        for (auto& v : x) {
            prev = 0.5 * prev + rng.normal();
            v = prev;
        }
        const auto r = prep::adf_test(testsup::series_of(std::move(x)));
        CHECK(r.adf_statistic == doctest::Approx(-12.8044049703996).epsilon(1e-9));
        CHECK(r.lags_used == 0);
        CHECK(r.reject_unit_root);
    }
    SUBCASE("AR(0.95) near the unit root, seed 45") {
        resmix::GaussianRng rng(45);
        std::vector<double> x(800);
        double prev = 0.0;
        for (auto& v : x) {
            prev = 0.95 * prev + rng.normal();
            v = prev;
        }
        const auto r = prep::adf_test(testsup::series_of(std::move(x)));
        CHECK(r.adf_statistic == doctest::Approx(-4.28438057259793).epsilon(1e-9));
        CHECK(r.p_value == doctest::Approx(0.000472706502140231).epsilon(1e-6));
        CHECK(r.lags_used == 0);
    }
}

TEST_CASE("p-value mapping clamps at the surveyed statistic range") {
    // Far-left statistics saturate at 0, far-right at 1; the mapping is
    // monotone in between.
    resmix::GaussianRng rng(9);
    std::vector<double> base(200);
    for (auto& v : base) v = rng.normal();
    const auto r = prep::adf_test(testsup::series_of(base));
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
}

TEST_CASE("unit-root test input validation") {
    CHECK_THROWS_AS(prep::adf_test(testsup::white_noise(1, 10)), ArgumentError);
    // an oversized explicit ceiling is clamped, not fatal; the largest
    // feasible candidate at N = 100 is (N - 2) / 2 - 2 = 47
    const auto r = prep::adf_test(testsup::white_noise(1, 100), 90);
    CHECK(std::isfinite(r.adf_statistic));
    CHECK(r.lags_used <= 47);
}

TEST_CASE("location and scale do not change the test statistic") {
    const auto base = testsup::white_noise(11, 400);
    auto shifted = base;
    for (auto& v : shifted.samples) v = 5.0 + 3.0 * v;
    const auto r0 = prep::adf_test(base);
    const auto r1 = prep::adf_test(shifted);
    CHECK(r0.adf_statistic == doctest::Approx(r1.adf_statistic).epsilon(1e-9));
    CHECK(r0.lags_used == r1.lags_used);
}
