#include "ctqw/reconstruction.hpp"

#include <algorithm>
#include <numeric>

namespace ctqw {

namespace {

constexpr double kDuplicateXiTol = 1e-6;

}  // namespace

EvolutionMap reconstruct(const std::vector<Snapshot>& snapshots,
                         const std::vector<CalibratedXi>& calibration,
                         const std::optional<Eigen::VectorXd>& target_grid) {
    if (snapshots.size() < 2) throw std::invalid_argument("reconstruct: at least 2 snapshots required");
    if (snapshots.size() != calibration.size())
        throw std::invalid_argument("reconstruct: one calibrated xi per snapshot required");
    const Eigen::Index n_guides = snapshots.front().raw_intensities.size();
    for (const Snapshot& s : snapshots)
        if (s.raw_intensities.size() != n_guides)
            throw std::invalid_argument("reconstruct: snapshots disagree on guide count");

    std::vector<std::size_t> order(snapshots.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return calibration[a].xi < calibration[b].xi; });

    // Group xi values that agree within tolerance; average their normalized
    // frames so arbitrary-unit brightness does not weight the result.
    std::vector<double> xi_values;
    std::vector<Eigen::VectorXd> rows;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        Eigen::VectorXd accum = Eigen::VectorXd::Zero(n_guides);
        while (j < order.size() && calibration[order[j]].xi - calibration[order[i]].xi <= kDuplicateXiTol) {
            accum += normalize_frame(snapshots[order[j]].raw_intensities);
            ++j;
        }
        xi_values.push_back(calibration[order[i]].xi);
        rows.push_back(normalize_frame(accum));
        i = j;
    }

    EvolutionMap observed;
    observed.xi_grid = Eigen::Map<const Eigen::VectorXd>(xi_values.data(), xi_values.size());
    observed.frames.resize(rows.size(), n_guides);
    for (std::size_t r = 0; r < rows.size(); ++r) observed.frames.row(r) = rows[r].transpose();

    if (!target_grid) return observed;

    const Eigen::VectorXd& grid = *target_grid;
    if (grid.size() == 0) throw std::invalid_argument("reconstruct: target grid must not be empty");
    for (Eigen::Index g = 1; g < grid.size(); ++g)
        if (!(grid(g) > grid(g - 1)))
            throw std::invalid_argument("reconstruct: target grid must be strictly increasing");
    if (observed.rows() < 2)
        throw std::invalid_argument("reconstruct: interpolation requires at least 2 distinct xi values");
    const double lo = observed.xi_grid(0);
    const double hi = observed.xi_grid(observed.rows() - 1);
    if (grid(0) < lo - 1e-12 || grid(grid.size() - 1) > hi + 1e-12)
        throw std::invalid_argument("reconstruct: target grid extends beyond the observed xi range");

    EvolutionMap resampled;
    resampled.xi_grid = grid;
    resampled.frames.resize(grid.size(), n_guides);
    Eigen::Index seg = 0;
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        const double xi = std::clamp(grid(g), lo, hi);
        while (seg + 2 < observed.rows() && observed.xi_grid(seg + 1) < xi) ++seg;
        const double x0 = observed.xi_grid(seg);
        const double x1 = observed.xi_grid(seg + 1);
        const double t = (xi - x0) / (x1 - x0);
        if (t <= 0.0) {
            resampled.frames.row(g) = observed.frames.row(seg);  // node hit, already normalized
        } else if (t >= 1.0) {
            resampled.frames.row(g) = observed.frames.row(seg + 1);
        } else {
            const Eigen::VectorXd row =
                (1.0 - t) * observed.frames.row(seg) + t * observed.frames.row(seg + 1);
            resampled.frames.row(g) = normalize_frame(row).transpose();
        }
    }
    return resampled;
}

FidelityCurve fidelity_curve(const EvolutionMap& map_expt, const EvolutionMap& map_theory) {
    if (map_expt.xi_grid.size() != map_theory.xi_grid.size() ||
        map_expt.n_guides() != map_theory.n_guides())
        throw std::invalid_argument("fidelity_curve: grid mismatch");
    for (Eigen::Index i = 0; i < map_expt.xi_grid.size(); ++i) {
        const double scale = std::max({std::abs(map_expt.xi_grid(i)), std::abs(map_theory.xi_grid(i)), 1.0});
        if (std::abs(map_expt.xi_grid(i) - map_theory.xi_grid(i)) > 1e-12 * scale)
            throw std::invalid_argument("fidelity_curve: grid mismatch");
    }
    FidelityCurve curve;
    curve.xi_grid = map_expt.xi_grid;
    curve.values.resize(map_expt.rows());
    for (int i = 0; i < map_expt.rows(); ++i)
        curve.values(i) = fidelity(map_expt.frames.row(i), map_theory.frames.row(i));
    return curve;
}

}  // namespace ctqw
