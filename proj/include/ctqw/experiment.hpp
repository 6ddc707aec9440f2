// Synthetic measurement campaigns: forward-simulates the array and its
// reference pair under a strain sweep, then applies the detection chain
// (propagation loss, stray-light scatter, photon counting, readout noise)
// so the calibration and reconstruction stages can be validated against
// ground truth.
#pragma once

#include "ctqw/lattice.hpp"
#include "ctqw/reconstruction.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace ctqw {

/// Detection-chain model. photon_budget is the expected number of detected
/// photons per frame before loss (infinity turns counting noise off);
/// scatter_fraction of the total power is redistributed uniformly onto
/// scatter_sites (offsets from the central guide); readout_sigma is an
/// additive per-guide Gaussian noise scale relative to the photon budget.
struct NoiseModel {
    double photon_budget = 1e4;
    double scatter_fraction = 0.02;
    std::vector<int> scatter_sites{-3, 3};
    double readout_sigma = 0.001;
    double loss_db_per_mm = 0.1;
    std::uint64_t seed = 0;

    /// Noiseless limit: no counting, no scatter, no readout. Loss is kept;
    /// it cancels under normalization.
    static NoiseModel off() {
        NoiseModel m;
        m.photon_budget = std::numeric_limits<double>::infinity();
        m.scatter_fraction = 0.0;
        m.readout_sigma = 0.0;
        return m;
    }

    bool counting_enabled() const { return std::isfinite(photon_budget); }
    void validate(int n_guides) const;
};

/// A strain sweep at fixed wavelength and input guide. Strains must be
/// increasing and within [0, 0.15].
struct SweepPlan {
    Eigen::VectorXd strains;
    double wavelength_nm = 532.0;
    int input_index = 25;

    void validate(const Device& device) const;
};

/// Per-snapshot seed derived from the master seed by a splitmix64 hash of
/// the snapshot index, so sweeps are reproducible and order-independent.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t snapshot_index);

/// One synthetic camera frame at the given sweep point. Deterministic for
/// a fixed NoiseModel::seed.
Snapshot synth_snapshot(const Device& device, double strain, double wavelength_nm, int input_index,
                        const NoiseModel& noise);

/// One snapshot per strain, seeded via derive_seed(noise.seed, index).
std::vector<Snapshot> synth_sweep(const Device& device, const SweepPlan& plan, const NoiseModel& noise);

/// Fraction of power surviving the chip: 10^(-loss_db_per_mm * z / 10).
double loss_factor(double loss_db_per_mm, double z_mm);

}  // namespace ctqw
