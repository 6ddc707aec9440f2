#include "ctqw/evolution.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace ctqw;

namespace {

double unitarity_error(const UnitaryPropagator& u) {
    const Eigen::MatrixXcd defect =
        u.matrix.adjoint() * u.matrix - Eigen::MatrixXcd::Identity(u.dim(), u.dim());
    return defect.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("propagator at z = 0 is the identity") {
    const UnitaryPropagator u = propagator(uniform_coupling(7, 0.3), 0.0);
    CHECK((u.matrix - Eigen::MatrixXcd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(u.xi == 0.0);
}

TEST_CASE("two-guide coupler matches the closed form cos/sin solution") {
    const double gamma = 0.7;
    for (int i = 0; i <= 40; ++i) {
        const double angle = std::numbers::pi * i / 40.0;  // gamma * z
        const UnitaryPropagator u = propagator(uniform_coupling(2, gamma), angle / gamma);
        CHECK(std::abs(u.matrix(0, 0) - std::complex<double>(std::cos(angle), 0.0)) < 1e-12);
        CHECK(std::abs(u.matrix(0, 1) - std::complex<double>(0.0, std::sin(angle))) < 1e-12);
        CHECK(std::abs(u.matrix(0, 1) - u.matrix(1, 0)) < 1e-14);
    }
    // Full power transfer at gamma z = pi/2.
    const UnitaryPropagator half = propagator(uniform_coupling(2, gamma), std::numbers::pi / (2.0 * gamma));
    CHECK(std::abs(half.matrix(0, 0)) < 1e-12);
    CHECK(std::abs(half.matrix(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(half.xi == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("central-input intensities match the Bessel solution of the infinite array") {
    const int n = 101;
    const int center = 50;
    const CouplingMatrix coupling = uniform_coupling(n, 1.0);
    const SymmetricEvolver evolver(coupling);
    for (double gz : {0.5, 1.0, 2.0, 4.0}) {
        const IntensityFrame frame = intensity_frame(evolver.propagator(gz), center);
        for (int k = center - 20; k <= center + 20; ++k) {
            const double j = oracle::bessel_j(k - center, 2.0 * gz);
            CHECK(std::abs(frame.intensities(k) - j * j) < 1e-6);
        }
    }
}

TEST_CASE("evolve_amplitudes: identity, single-site and mirror symmetry") {
    const int n = 21;
    const CouplingMatrix coupling = uniform_coupling(n, 0.4);

    Eigen::VectorXcd input = Eigen::VectorXcd::Zero(n);
    input(4) = 1.0;
    const UnitaryPropagator id = propagator(coupling, 0.0);
    CHECK((evolve_amplitudes(id, input) - input).norm() < 1e-13);

    const UnitaryPropagator u = propagator(coupling, 3.0);
    CHECK((evolve_amplitudes(u, input) - u.matrix.col(4)).norm() < 1e-13);
    CHECK(std::abs(evolve_amplitudes(u, input).norm() - 1.0) < 1e-10);

    // Mirror-symmetric input on the mirror-symmetric array.
    Eigen::VectorXcd symmetric = Eigen::VectorXcd::Zero(n);
    symmetric(8) = symmetric(12) = std::complex<double>(0.0, 1.0 / std::sqrt(2.0));
    const Eigen::VectorXcd out = evolve_amplitudes(u, symmetric);
    for (int k = 0; k < n; ++k)
        CHECK(std::abs(std::norm(out(k)) - std::norm(out(n - 1 - k))) < 1e-10);

    CHECK_THROWS_AS(evolve_amplitudes(u, Eigen::VectorXcd::Zero(5)), std::invalid_argument);
    CHECK_THROWS_AS(evolve_amplitudes(u, Eigen::VectorXcd::Ones(n)), std::invalid_argument);
}

TEST_CASE("intensity frames: delta input, analytics and shape") {
    const CouplingMatrix pair = uniform_coupling(2, 1.0);
    for (double gz : {0.1, 0.4, 1.0, 2.2}) {
        const IntensityFrame frame = intensity_frame(propagator(pair, gz), 0);
        CHECK(frame.intensities(0) == doctest::Approx(std::cos(gz) * std::cos(gz)).epsilon(1e-12));
        CHECK(frame.intensities(1) == doctest::Approx(std::sin(gz) * std::sin(gz)).epsilon(1e-12));
    }

    const int n = 51;
    const int center = 25;
    const CouplingMatrix coupling = uniform_coupling(n, 0.0852718005974372);

    const IntensityFrame at_zero = intensity_frame(propagator(coupling, 0.0), center);
    CHECK(at_zero.intensities(center) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(at_zero.intensities.sum() == doctest::Approx(1.0).epsilon(1e-12));

    // Self-consistency with the raw propagator column plus mirror symmetry.
    const UnitaryPropagator u = propagator(coupling, z_for_xi(coupling.gamma_ref(), 0.38));
    const IntensityFrame frame = intensity_frame(u, center);
    CHECK(frame.xi == doctest::Approx(0.38).epsilon(1e-14));
    const Eigen::VectorXd direct = u.matrix.col(center).cwiseAbs2();
    CHECK((frame.intensities - direct / direct.sum()).cwiseAbs().maxCoeff() < 1e-14);
    for (int k = 0; k < n; ++k)
        CHECK(std::abs(frame.intensities(k) - frame.intensities(n - 1 - k)) < 1e-10);
    CHECK(frame.intensities(center) > frame.intensities(center + 1));  // still center-dominated

    // Farther along the walk the profile is edge-dominated (ballistic lobes).
    const IntensityFrame later =
        intensity_frame(propagator(coupling, z_for_xi(coupling.gamma_ref(), 0.8)), center);
    CHECK(later.intensities(center + 1) > later.intensities(center));
    CHECK(later.intensities(center - 1) > later.intensities(center));

    CHECK_THROWS_AS(intensity_frame(u, -1), std::invalid_argument);
    CHECK_THROWS_AS(intensity_frame(u, n), std::invalid_argument);
}

TEST_CASE("unitarity, symmetry and the semigroup property") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> z_dist(0.0, 30.0);
    for (int trial = 0; trial < 10; ++trial) {
        const CouplingMatrix coupling =
            trial % 2 == 0 ? uniform_coupling(17, 0.3)
                           : CouplingMatrix::from_matrix(oracle::random_symmetric_coupling(9, rng));
        const SymmetricEvolver evolver(coupling);
        const double z1 = z_dist(rng);
        const double z2 = z_dist(rng);
        const UnitaryPropagator u1 = evolver.propagator(z1);
        const UnitaryPropagator u2 = evolver.propagator(z2);
        const UnitaryPropagator u12 = evolver.propagator(z1 + z2);
        CHECK(unitarity_error(u1) < 1e-10);
        CHECK((u1.matrix - u1.matrix.transpose().eval()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((u1.matrix * u2.matrix - u12.matrix).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("gamma-z factorization: only the product matters") {
    const int n = 51;
    const double gamma = 0.02;
    const double z = 150.0;
    const IntensityFrame base = intensity_frame(propagator(uniform_coupling(n, gamma), z), n / 2);
    for (double a : {0.5, 2.0, 10.0}) {
        const IntensityFrame scaled =
            intensity_frame(propagator(uniform_coupling(n, a * gamma), z / a), n / 2);
        CHECK((base.intensities - scaled.intensities).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("evolution maps: grids, factorization and the half-range tuning") {
    const int n = 51;
    Eigen::VectorXd single(1);
    single << 0.0;
    const EvolutionMap delta = evolution_map(uniform_coupling(n, 0.02), single, n / 2);
    CHECK(delta.rows() == 1);
    CHECK(delta.frames(0, n / 2) == doctest::Approx(1.0).epsilon(1e-14));

    // Builder form agrees with the shared-decomposition form.
    Eigen::VectorXd grid(26);
    for (int i = 0; i < 26; ++i) grid(i) = 2.546 * i / 25.0;
    const EvolutionMap fast = evolution_map(uniform_coupling(n, 0.02), grid, n / 2);
    const CouplingAtXi builder = [&](double xi) {
        const double gamma = 0.013;  // any realization of the same xi
        return std::make_pair(uniform_coupling(n, gamma), xi == 0.0 ? 0.0 : z_for_xi(gamma, xi));
    };
    const EvolutionMap general = evolution_map(builder, grid, n / 2);
    CHECK((fast.frames - general.frames).cwiseAbs().maxCoeff() < 1e-10);

    // Halving gamma at fixed z probes exactly half the xi range.
    const double z_max = 200.0;
    Eigen::VectorXd z_grid(41);
    for (int i = 0; i <= 40; ++i) z_grid(i) = z_max * i / 40.0;
    auto map_at_gamma = [&](double gamma) {
        Eigen::VectorXd xi(z_grid.size());
        for (Eigen::Index i = 0; i < z_grid.size(); ++i) xi(i) = normalized_length(gamma, z_grid(i));
        return evolution_map(uniform_coupling(n, gamma), xi, n / 2);
    };
    const EvolutionMap full = map_at_gamma(0.02);
    const EvolutionMap tuned = map_at_gamma(0.01);
    CHECK(tuned.xi_grid(40) == 0.5 * full.xi_grid(40));
    // The tuned map is the first half of the full map, frame by frame.
    const EvolutionMap full_on_tuned_grid = evolution_map(uniform_coupling(n, 0.02), tuned.xi_grid, n / 2);
    CHECK((tuned.frames - full_on_tuned_grid.frames).cwiseAbs().maxCoeff() < 1e-10);

    Eigen::VectorXd not_increasing(2);
    not_increasing << 0.3, 0.3;
    CHECK_THROWS_AS(evolution_map(uniform_coupling(n, 0.02), not_increasing, n / 2),
                    std::invalid_argument);
    Eigen::VectorXd negative(2);
    negative << -0.1, 0.3;
    CHECK_THROWS_AS(evolution_map(uniform_coupling(n, 0.02), negative, n / 2), std::invalid_argument);
    Eigen::VectorXd positive(2);
    positive << 0.1, 0.3;
    CHECK_THROWS_AS(evolution_map(uniform_coupling(n, 0.0), positive, n / 2), std::invalid_argument);
}

TEST_CASE("two-photon correlation: basis inputs, HOM dip and normalization") {
    const int n = 5;
    const UnitaryPropagator id = propagator(uniform_coupling(n, 0.3), 0.0);
    const TwoPhotonCorrelation basis = two_photon_correlation(id, 1, 3);
    CHECK(basis.gamma_qr(1, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(basis.gamma_qr(3, 1) == doctest::Approx(1.0).epsilon(1e-12));
    double off_pair_total = 0.0;
    for (int q = 0; q < n; ++q)
        for (int r = 0; r <= q; ++r)
            if (!((q == 3 && r == 1))) off_pair_total += basis.gamma_qr(q, r);
    CHECK(off_pair_total < 1e-14);

    // Balanced coupler: indistinguishable photons bunch, coincidence vanishes.
    const double gamma = 1.0;
    const UnitaryPropagator balanced = propagator(uniform_coupling(2, gamma), std::numbers::pi / (4.0 * gamma));
    const TwoPhotonCorrelation hom = two_photon_correlation(balanced, 0, 1);
    CHECK(hom.gamma_qr(0, 1) < 1e-10);
    CHECK(hom.gamma_qr(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(hom.gamma_qr(1, 1) == doctest::Approx(0.5).epsilon(1e-12));

    // Random couplings on N = 7: symmetry and unordered-pair normalization,
    // cross-checked against a brute-force evaluation from the raw unitary.
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> site(0, 6);
    for (int trial = 0; trial < 8; ++trial) {
        const CouplingMatrix coupling =
            CouplingMatrix::from_matrix(oracle::random_symmetric_coupling(7, rng));
        const UnitaryPropagator u = propagator(coupling, 1.7 + 0.3 * trial);
        const int k = site(rng);
        const int l = trial % 3 == 0 ? k : site(rng);
        const TwoPhotonCorrelation corr = two_photon_correlation(u, k, l);

        CHECK((corr.gamma_qr - corr.gamma_qr.transpose().eval()).cwiseAbs().maxCoeff() == 0.0);
        double total = 0.0;
        for (int q = 0; q < 7; ++q)
            for (int r = 0; r <= q; ++r) total += corr.gamma_qr(q, r);
        CHECK(std::abs(total - 1.0) < 1e-12);

        double brute = 0.0;
        for (int q = 0; q < 7; ++q)
            for (int r = 0; r < 7; ++r) {
                const std::complex<double> amp = u.matrix(q, k) * u.matrix(r, l) + u.matrix(q, l) * u.matrix(r, k);
                const double p = std::norm(amp) / ((q == r ? 2.0 : 1.0) * (k == l ? 2.0 : 1.0));
                brute += (r <= q) ? p : 0.0;
            }
        CHECK(brute == doctest::Approx(1.0).epsilon(1e-12));  // bosonic probabilities close on their own
    }

    CHECK_THROWS_AS(two_photon_correlation(id, -1, 2), std::invalid_argument);
    CHECK_THROWS_AS(two_photon_correlation(id, 0, n), std::invalid_argument);
}
