#include "ctqw/calibration.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

using namespace ctqw;

namespace {

/// Forward two-guide simulation: the reading a reference pair produces at
/// a given true xi (up to an arbitrary common scale).
ReferenceReading reading_at(double xi, double scale = 1.0) {
    const double angle = 0.5 * std::numbers::pi * xi;
    return ReferenceReading{scale * std::cos(angle) * std::cos(angle),
                            scale * std::sin(angle) * std::sin(angle)};
}

std::vector<ReferenceReading> sweep_of(const std::vector<double>& xis) {
    std::vector<ReferenceReading> readings;
    for (double xi : xis) readings.push_back(reading_at(xi));
    return readings;
}

std::vector<double> linspace(double from, double to, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = from + (to - from) * i / (count - 1);
    return v;
}

}  // namespace

TEST_CASE("single-reading inversion on the principal branch") {
    CHECK(xi_from_reference({1.0, 0.0}).xi == 0.0);
    CHECK(xi_from_reference({0.0, 1.0}).xi == 1.0);
    const CalibratedXi half = xi_from_reference({0.5, 0.5});
    CHECK(half.xi == doctest::Approx(0.5).epsilon(1e-12));  // sin^2(pi/4) = 1/2
    CHECK(half.branch == 0);
    CHECK(half.residual == 0.0);

    CHECK_THROWS_AS(xi_from_reference({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(xi_from_reference({-0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("inversion is scale invariant in the powers") {
    const ReferenceReading base{0.371, 0.629};
    const double xi = xi_from_reference(base).xi;
    for (double c : {2.0, 0.25, 1024.0})  // power-of-two scaling is exact
        CHECK(xi_from_reference({c * base.p_bar, c * base.p_cross}).xi == xi);
    for (double c : {3.7, 0.0091})
        CHECK(xi_from_reference({c * base.p_bar, c * base.p_cross}).xi ==
              doctest::Approx(xi).epsilon(1e-14));
}

TEST_CASE("near-degenerate readings clamp to the boundary") {
    CHECK(xi_from_reference({1.0, 1e-8}).xi == 0.0);
    CHECK(xi_from_reference({1e-8, 1.0}).xi == 1.0);
}

TEST_CASE("sweep of one reading takes the principal branch") {
    const auto result = calibrate_sweep({reading_at(0.73)});
    REQUIRE(result.size() == 1);
    CHECK(result[0].xi == doctest::Approx(0.73).epsilon(1e-12));
    CHECK(result[0].branch == 0);
}

TEST_CASE("noiseless sweep recovers the measured endpoint values") {
    const auto truth = linspace(0.38, 0.13, 26);
    const auto result = calibrate_sweep(sweep_of(truth));
    REQUIRE(result.size() == truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        CHECK(result[i].xi == doctest::Approx(truth[i]).epsilon(1e-9));
        CHECK(result[i].branch == 0);
    }
}

TEST_CASE("sweep crossing xi = 1 unfolds onto branch 1") {
    const auto truth = linspace(1.4, 0.6, 17);
    const auto result = calibrate_sweep(sweep_of(truth));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        CHECK(std::abs(result[i].xi - truth[i]) < 1e-9);
        CHECK(result[i].branch == (truth[i] > 1.0 ? 1 : 0));
    }
}

TEST_CASE("round trip across branches 0..2, both sweep directions") {
    // Dense descending sweep spanning (0, 3); passes through xi = 2 where
    // adjacent readings mirror about the even integer.
    const auto truth = linspace(2.95, 0.05, 59);
    const auto result = calibrate_sweep(sweep_of(truth));
    for (std::size_t i = 0; i < truth.size(); ++i)
        CHECK(std::abs(result[i].xi - truth[i]) < 1e-9);

    auto ascending = truth;
    std::reverse(ascending.begin(), ascending.end());
    CalibrateOptions up;
    up.direction = SweepDirection::increasing;
    const auto result_up = calibrate_sweep(sweep_of(ascending), up);
    for (std::size_t i = 0; i < ascending.size(); ++i)
        CHECK(std::abs(result_up[i].xi - ascending[i]) < 1e-9);
}

TEST_CASE("no monotone branch assignment reports the first violating index") {
    // Alternating transfers cannot descend once the allowed range is used up.
    CalibrateOptions options;
    options.max_xi = 2.0;
    options.monotone_tol = 0.0;
    const std::vector<ReferenceReading> readings = {reading_at(0.1), reading_at(0.9), reading_at(0.1),
                                                    reading_at(0.9)};
    CHECK_THROWS_WITH_AS(calibrate_sweep(readings, options), doctest::Contains("index 3"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(calibrate_sweep(readings, options), doctest::Contains("monotone"),
                         std::runtime_error);
}

TEST_CASE("residual inflates where the inversion loses sensitivity") {
    // Additive power noise worth 1% of the total, applied near xi = 1 where
    // d xi / d x diverges, versus mid-range where it is benign.
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 0.01);
    auto noisy_sweep = [&](double from, double to) {
        std::vector<ReferenceReading> readings;
        for (double xi : linspace(from, to, 21)) {
            ReferenceReading r = reading_at(xi);
            r.p_bar = std::max(r.p_bar + gauss(rng), 0.0);
            r.p_cross = std::max(r.p_cross + gauss(rng), 0.0);
            readings.push_back(r);
        }
        return readings;
    };

    auto mean_residual = [](const std::vector<CalibratedXi>& result) {
        double total = 0.0;
        for (const CalibratedXi& c : result) total += c.residual;
        return total / result.size();
    };

    const double near_one = mean_residual(calibrate_sweep(noisy_sweep(0.995, 0.95)));
    const double mid_range = mean_residual(calibrate_sweep(noisy_sweep(0.545, 0.50)));
    CHECK(near_one > 3.0 * mid_range);
}
