#include "ctqw/experiment.hpp"

#include "ctqw/evolution.hpp"

#include <cmath>
#include <random>

namespace ctqw {

void NoiseModel::validate(int n_guides) const {
    if (!(photon_budget > 0.0)) throw std::invalid_argument("NoiseModel: photon_budget must be > 0");
    if (scatter_fraction < 0.0 || scatter_fraction >= 1.0)
        throw std::invalid_argument("NoiseModel: scatter_fraction must be in [0, 1)");
    if (readout_sigma < 0.0) throw std::invalid_argument("NoiseModel: readout_sigma must be >= 0");
    if (loss_db_per_mm < 0.0) throw std::invalid_argument("NoiseModel: loss_db_per_mm must be >= 0");
    if (scatter_fraction > 0.0 && scatter_sites.empty())
        throw std::invalid_argument("NoiseModel: scatter_sites required when scatter_fraction > 0");
    const int center = (n_guides - 1) / 2;
    for (int offset : scatter_sites) {
        const int index = center + offset;
        if (index < 0 || index >= n_guides)
            throw std::invalid_argument("NoiseModel: scatter site offset outside the array");
    }
}

void SweepPlan::validate(const Device& device) const {
    if (strains.size() < 1) throw std::invalid_argument("SweepPlan: at least one strain required");
    for (Eigen::Index i = 0; i < strains.size(); ++i) {
        if (strains(i) < 0.0 || strains(i) > 0.15)
            throw std::invalid_argument("SweepPlan: strains must lie within [0, 0.15]");
        if (i > 0 && !(strains(i) > strains(i - 1)))
            throw std::invalid_argument("SweepPlan: strains must be increasing");
    }
    if (input_index < 0 || input_index >= device.geometry.n_guides)
        throw std::invalid_argument("SweepPlan: input_index outside the array");
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t snapshot_index) {
    // splitmix64 of master + odd stride * (index + 1)
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (snapshot_index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double loss_factor(double loss_db_per_mm, double z_mm) {
    return std::pow(10.0, -loss_db_per_mm * z_mm / 10.0);
}

namespace {

double sample_counts(std::mt19937_64& rng, double mean) {
    if (!(mean > 0.0)) return 0.0;
    std::poisson_distribution<long long> poisson(mean);
    return static_cast<double>(poisson(rng));
}

}  // namespace

Snapshot synth_snapshot(const Device& device, double strain, double wavelength_nm, int input_index,
                        const NoiseModel& noise) {
    device.validate();
    noise.validate(device.geometry.n_guides);
    const int n = device.geometry.n_guides;
    if (input_index < 0 || input_index >= n)
        throw std::invalid_argument("synth_snapshot: input_index outside the array");

    const double z = device.geometry.chip_length_mm;
    const double gamma = device.gamma(strain, wavelength_nm);
    const double loss = loss_factor(noise.loss_db_per_mm, z);

    // True array frame and two-guide reference transfer at this sweep point.
    const Eigen::VectorXd frame =
        intensity_frame(propagator(uniform_coupling(n, gamma), z), input_index).intensities;
    const double ref_angle = gamma * device.reference_gamma_scale * z;
    const double ref_bar = std::cos(ref_angle) * std::cos(ref_angle);
    const double ref_cross = std::sin(ref_angle) * std::sin(ref_angle);

    // Detected mean powers: loss, then scatter moved onto the stray sites.
    Eigen::VectorXd mean = frame * loss;
    if (noise.scatter_fraction > 0.0) {
        const double moved = mean.sum() * noise.scatter_fraction;
        mean *= (1.0 - noise.scatter_fraction);
        const int center = (n - 1) / 2;
        for (int offset : noise.scatter_sites) mean(center + offset) += moved / noise.scatter_sites.size();
    }

    Snapshot snapshot;
    snapshot.strain = strain;
    snapshot.wavelength_nm = wavelength_nm;
    snapshot.seed = noise.seed;

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool counting = noise.counting_enabled();

    // Fixed sampling order: array counts, reference counts, then readout.
    snapshot.raw_intensities.resize(n);
    for (int k = 0; k < n; ++k)
        snapshot.raw_intensities(k) = counting ? sample_counts(rng, noise.photon_budget * mean(k)) : mean(k);
    double p_bar = counting ? sample_counts(rng, noise.photon_budget * loss * ref_bar) : loss * ref_bar;
    double p_cross = counting ? sample_counts(rng, noise.photon_budget * loss * ref_cross) : loss * ref_cross;

    if (noise.readout_sigma > 0.0) {
        const double scale = noise.readout_sigma * (counting ? noise.photon_budget : 1.0);
        for (int k = 0; k < n; ++k) snapshot.raw_intensities(k) += scale * gauss(rng);
        p_bar += scale * gauss(rng);
        p_cross += scale * gauss(rng);
    }

    snapshot.raw_intensities = snapshot.raw_intensities.cwiseMax(0.0);
    snapshot.reference = ReferenceReading{std::max(p_bar, 0.0), std::max(p_cross, 0.0)};
    return snapshot;
}

std::vector<Snapshot> synth_sweep(const Device& device, const SweepPlan& plan, const NoiseModel& noise) {
    plan.validate(device);
    std::vector<Snapshot> snapshots;
    snapshots.reserve(plan.strains.size());
    for (Eigen::Index i = 0; i < plan.strains.size(); ++i) {
        NoiseModel per_snapshot = noise;
        per_snapshot.seed = derive_seed(noise.seed, static_cast<std::uint64_t>(i));
        snapshots.push_back(
            synth_snapshot(device, plan.strains(i), plan.wavelength_nm, plan.input_index, per_snapshot));
    }
    return snapshots;
}

}  // namespace ctqw
