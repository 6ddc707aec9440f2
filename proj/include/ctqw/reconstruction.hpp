// Stacks calibrated end-face snapshots into an evolution map and scores
// reconstructions against theory with the normalized-overlap fidelity.
#pragma once

#include "ctqw/calibration.hpp"
#include "ctqw/evolution.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ctqw {

/// One simulated camera measurement: raw array intensities in arbitrary
/// units plus the reference-pair reading and the settings it was taken at.
struct Snapshot {
    Eigen::VectorXd raw_intensities;
    ReferenceReading reference;
    double strain = 0.0;
    double wavelength_nm = 0.0;
    std::optional<std::uint64_t> seed;
};

/// Per-row fidelity of an experimental map against theory on a shared grid.
struct FidelityCurve {
    Eigen::VectorXd xi_grid;
    Eigen::VectorXd values;
};

/// Scales a nonnegative vector to unit sum. Throws on an all-zero input.
template <typename Derived>
Eigen::VectorXd normalize_frame(const Eigen::MatrixBase<Derived>& raw) {
    const double total = raw.sum();
    if (!(total > 0.0)) throw std::invalid_argument("normalize_frame: total power must be > 0");
    return raw.derived().template cast<double>() / total;
}

/// Normalized overlap of two intensity distributions,
/// F = sum(e t) / sqrt(sum(e^2) sum(t^2)), in [0, 1] with equality to 1
/// exactly when the distributions are proportional. Symmetric and
/// invariant under positive rescaling of either argument.
template <typename DerivedE, typename DerivedT>
double fidelity(const Eigen::MatrixBase<DerivedE>& expt, const Eigen::MatrixBase<DerivedT>& theory) {
    if (expt.size() != theory.size()) throw std::invalid_argument("fidelity: length mismatch");
    const double ee = expt.cwiseAbs2().sum();
    const double tt = theory.cwiseAbs2().sum();
    if (!(ee > 0.0) || !(tt > 0.0)) throw std::invalid_argument("fidelity: zero vector");
    const double et = (expt.derived().template cast<double>().array() *
                       theory.derived().template cast<double>().array())
                          .sum();
    return et / std::sqrt(ee * tt);
}

/// Sorts snapshots by their calibrated xi, averages duplicates (xi within
/// 1e-6), normalizes every frame, and optionally resamples onto target_grid
/// by per-guide linear interpolation followed by re-normalization. The
/// target grid must lie inside the observed xi range, and interpolation
/// requires at least two distinct xi values. Input order does not matter.
EvolutionMap reconstruct(const std::vector<Snapshot>& snapshots,
                         const std::vector<CalibratedXi>& calibration,
                         const std::optional<Eigen::VectorXd>& target_grid = std::nullopt);

/// Row-wise fidelity of two maps on the same grid.
FidelityCurve fidelity_curve(const EvolutionMap& map_expt, const EvolutionMap& map_theory);

}  // namespace ctqw
