// Unitary evolution of a continuous-time walk on a coupled array:
// U(z) = exp(i z C) for a real symmetric coupling matrix C, plus the
// single- and two-photon observables derived from it. The exponential is
// evaluated by symmetric eigendecomposition, so one decomposition is
// shared across all propagation distances of the same C.
#pragma once

#include "ctqw/lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>

namespace ctqw {

/// Complex symmetric unitary exp(i z C). xi records the normalized
/// propagation 2*gamma_ref*z/pi at which it was evaluated.
struct UnitaryPropagator {
    Eigen::MatrixXcd matrix;
    double xi = 0.0;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Per-waveguide output powers at one normalized propagation value,
/// normalized to unit total.
struct IntensityFrame {
    double xi = 0.0;
    Eigen::VectorXd intensities;
};

/// Stack of intensity frames over a strictly increasing xi grid; one row
/// per frame, each row normalized to unit sum.
struct EvolutionMap {
    Eigen::VectorXd xi_grid;
    Eigen::MatrixXd frames;  // rows() == xi_grid.size(), cols() == n_guides

    int rows() const { return static_cast<int>(frames.rows()); }
    int n_guides() const { return static_cast<int>(frames.cols()); }
};

/// Probabilities of finding a photon pair in output guides (q, r), stored
/// as a symmetric matrix; the sum over unordered pairs q <= r is 1.
struct TwoPhotonCorrelation {
    Eigen::MatrixXd gamma_qr;
};

/// Eigendecomposition of a coupling matrix, reusable across many z values.
class SymmetricEvolver {
public:
    explicit SymmetricEvolver(const CouplingMatrix& coupling);

    UnitaryPropagator propagator(double z_mm) const;
    double gamma_ref() const { return gamma_ref_; }

private:
    Eigen::MatrixXd vectors_;
    Eigen::VectorXd values_;
    double gamma_ref_ = 0.0;
};

/// exp(i z C) via one-shot eigendecomposition. Unitary and symmetric up to
/// roundoff because C is real symmetric.
UnitaryPropagator propagator(const CouplingMatrix& coupling, double z_mm);

/// U * input for a unit-norm amplitude vector. Norm is preserved.
Eigen::VectorXcd evolve_amplitudes(const UnitaryPropagator& u, const Eigen::VectorXcd& input);

/// Output intensities |U_{k,input_index}|^2 for single-site injection,
/// normalized to unit sum.
IntensityFrame intensity_frame(const UnitaryPropagator& u, int input_index);

/// Builder resolving a grid point xi to a (coupling, z) pair realizing it;
/// any pair with 2*gamma*z/pi == xi produces the same frame.
using CouplingAtXi = std::function<std::pair<CouplingMatrix, double>(double xi)>;

EvolutionMap evolution_map(const CouplingAtXi& builder, const Eigen::VectorXd& xi_grid, int input_index);

/// Evolution map of a fixed coupling matrix over a xi grid, sharing one
/// eigendecomposition across all grid points (z_i = xi_i * pi / (2 gamma)).
EvolutionMap evolution_map(const CouplingMatrix& coupling, const Eigen::VectorXd& xi_grid, int input_index);

/// Map of the uniform n-guide array over a xi grid. gamma and z drop out
/// individually; only xi matters.
EvolutionMap uniform_evolution_map(int n_guides, const Eigen::VectorXd& xi_grid, int input_index);

/// Pair correlation for indistinguishable photons injected at guides k and
/// l (k == l allowed): Gamma_{q,r} proportional to
/// |U_{q,k} U_{r,l} + U_{q,l} U_{r,k}|^2 with the bosonic 1/(1+delta)
/// occupancy factors, normalized over unordered pairs.
TwoPhotonCorrelation two_photon_correlation(const UnitaryPropagator& u, int k, int l);

}  // namespace ctqw
