#include "ctqw/evolution.hpp"

#include <cmath>
#include <numbers>

namespace ctqw {

namespace {

void check_input_index(int index, int n, const char* who) {
    if (index < 0 || index >= n)
        throw std::invalid_argument(std::string(who) + ": input index out of range");
}

Eigen::VectorXd normalized_or_throw(const Eigen::VectorXd& v, const char* who) {
    const double total = v.sum();
    if (!(total > 0.0)) throw std::runtime_error(std::string(who) + ": non-positive total intensity");
    return v / total;
}

}  // namespace

SymmetricEvolver::SymmetricEvolver(const CouplingMatrix& coupling) : gamma_ref_(coupling.gamma_ref()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(coupling.matrix());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("SymmetricEvolver: eigendecomposition failed");
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();
}

UnitaryPropagator SymmetricEvolver::propagator(double z_mm) const {
    if (z_mm < 0.0) throw std::invalid_argument("propagator: z must be >= 0");
    const Eigen::Index n = values_.size();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index j = 0; j < n; ++j)
        phases(j) = std::polar(1.0, z_mm * values_(j));
    // V diag(e^{iz lambda}) V^T: symmetric because the transpose (not the
    // adjoint) of the real eigenvector matrix closes the product.
    Eigen::MatrixXcd u = vectors_.cast<std::complex<double>>() * phases.asDiagonal() *
                         vectors_.transpose().cast<std::complex<double>>();
    return UnitaryPropagator{std::move(u), normalized_length(gamma_ref_, z_mm)};
}

UnitaryPropagator propagator(const CouplingMatrix& coupling, double z_mm) {
    return SymmetricEvolver(coupling).propagator(z_mm);
}

Eigen::VectorXcd evolve_amplitudes(const UnitaryPropagator& u, const Eigen::VectorXcd& input) {
    if (input.size() != u.matrix.rows())
        throw std::invalid_argument("evolve_amplitudes: dimension mismatch");
    if (std::abs(input.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("evolve_amplitudes: input must have unit norm");
    return u.matrix * input;
}

IntensityFrame intensity_frame(const UnitaryPropagator& u, int input_index) {
    check_input_index(input_index, u.dim(), "intensity_frame");
    Eigen::VectorXd raw = u.matrix.col(input_index).cwiseAbs2();
    return IntensityFrame{u.xi, normalized_or_throw(raw, "intensity_frame")};
}

namespace {

void check_xi_grid(const Eigen::VectorXd& xi_grid) {
    if (xi_grid.size() == 0) throw std::invalid_argument("evolution_map: xi grid must not be empty");
    if (xi_grid(0) < 0.0) throw std::invalid_argument("evolution_map: xi grid must be nonnegative");
    for (Eigen::Index i = 1; i < xi_grid.size(); ++i)
        if (!(xi_grid(i) > xi_grid(i - 1)))
            throw std::invalid_argument("evolution_map: xi grid must be strictly increasing");
}

}  // namespace

EvolutionMap evolution_map(const CouplingAtXi& builder, const Eigen::VectorXd& xi_grid, int input_index) {
    check_xi_grid(xi_grid);
    EvolutionMap map;
    map.xi_grid = xi_grid;
    for (Eigen::Index i = 0; i < xi_grid.size(); ++i) {
        const auto [coupling, z] = builder(xi_grid(i));
        const IntensityFrame frame = intensity_frame(propagator(coupling, z), input_index);
        if (i == 0)
            map.frames.resize(xi_grid.size(), frame.intensities.size());
        else if (frame.intensities.size() != map.frames.cols())
            throw std::invalid_argument("evolution_map: builder changed the array dimension");
        map.frames.row(i) = frame.intensities.transpose();
    }
    return map;
}

EvolutionMap evolution_map(const CouplingMatrix& coupling, const Eigen::VectorXd& xi_grid, int input_index) {
    check_xi_grid(xi_grid);
    check_input_index(input_index, coupling.dim(), "evolution_map");
    const SymmetricEvolver evolver(coupling);
    if (!(coupling.gamma_ref() > 0.0) && xi_grid(xi_grid.size() - 1) > 0.0)
        throw std::invalid_argument("evolution_map: zero coupling cannot realize xi > 0");
    EvolutionMap map;
    map.xi_grid = xi_grid;
    map.frames.resize(xi_grid.size(), coupling.dim());
    for (Eigen::Index i = 0; i < xi_grid.size(); ++i) {
        const double z = xi_grid(i) == 0.0 ? 0.0 : z_for_xi(coupling.gamma_ref(), xi_grid(i));
        map.frames.row(i) = intensity_frame(evolver.propagator(z), input_index).intensities.transpose();
    }
    return map;
}

EvolutionMap uniform_evolution_map(int n_guides, const Eigen::VectorXd& xi_grid, int input_index) {
    return evolution_map(uniform_coupling(n_guides, 1.0), xi_grid, input_index);
}

TwoPhotonCorrelation two_photon_correlation(const UnitaryPropagator& u, int k, int l) {
    const int n = u.dim();
    check_input_index(k, n, "two_photon_correlation");
    check_input_index(l, n, "two_photon_correlation");
    const double input_factor = (k == l) ? 2.0 : 1.0;

    Eigen::MatrixXd gamma(n, n);
    for (int q = 0; q < n; ++q) {
        for (int r = 0; r <= q; ++r) {
            const std::complex<double> amplitude =
                u.matrix(q, k) * u.matrix(r, l) + u.matrix(q, l) * u.matrix(r, k);
            const double occupancy = (q == r) ? 2.0 : 1.0;
            const double p = std::norm(amplitude) / (occupancy * input_factor);
            gamma(q, r) = p;
            gamma(r, q) = p;
        }
    }

    // The bosonic output probabilities already sum to 1 over unordered
    // pairs for unitary U; the explicit division removes the roundoff.
    double total = 0.0;
    for (int q = 0; q < n; ++q)
        for (int r = 0; r <= q; ++r) total += gamma(q, r);
    if (!(total > 0.0)) throw std::runtime_error("two_photon_correlation: degenerate correlation");
    gamma /= total;
    return TwoPhotonCorrelation{std::move(gamma)};
}

}  // namespace ctqw
