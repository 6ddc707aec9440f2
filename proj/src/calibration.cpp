#include "ctqw/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ctqw {

namespace {

constexpr double kClampWindow = 1e-6;   // x this close to 0 or 1 clamps to the boundary
constexpr double kStrictTol = 1e-12;    // step beyond this against the direction counts as a violation

double transfer_fraction(const ReferenceReading& reading) {
    if (reading.p_bar < 0.0 || reading.p_cross < 0.0)
        throw std::invalid_argument("xi_from_reference: powers must be nonnegative");
    const double total = reading.p_bar + reading.p_cross;
    if (!(total > 0.0)) throw std::invalid_argument("xi_from_reference: both powers are zero");
    double x = reading.p_cross / total;
    if (x < kClampWindow) x = 0.0;
    if (x > 1.0 - kClampWindow) x = 1.0;
    return x;
}

double principal_xi(double x) {
    return 2.0 * std::asin(std::sqrt(x)) / std::numbers::pi;  // in [0, 1]
}

// Monotonic segments of sin^2(pi xi / 2) as half-open intervals from
// above, so the fold points xi = 1, 2, ... close the branch below them.
int branch_of(double xi) {
    const int b = static_cast<int>(std::ceil(xi - 1e-12)) - 1;
    return std::max(b, 0);
}

/// All unfolded values 2m +/- xi0 within [0, max_xi], ascending.
std::vector<double> branch_candidates(double xi0, double max_xi) {
    std::vector<double> out;
    for (int m = 0; 2.0 * m - xi0 <= max_xi; ++m) {
        if (m > 0) out.push_back(2.0 * m - xi0);
        if (2.0 * m + xi0 <= max_xi) out.push_back(2.0 * m + xi0);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              out.end());
    return out;
}

struct PathCost {
    int violations = 0;
    double step_sq = 0.0;
    double xi_sum = 0.0;
};

// Lexicographic: squared variation first (with relative slack so
// roundoff-degenerate unfoldings tie), then direction violations (breaks
// mirror-image ties around even integers toward the monotone path), then
// total xi (prefers the lowest branches among shifted copies).
bool better(const PathCost& a, const PathCost& b) {
    const double slack = 1e-9 * std::max({a.step_sq, b.step_sq, 1e-30});
    if (a.step_sq < b.step_sq - slack) return true;
    if (b.step_sq < a.step_sq - slack) return false;
    if (a.violations != b.violations) return a.violations < b.violations;
    return a.xi_sum < b.xi_sum;
}

}  // namespace

CalibratedXi xi_from_reference(const ReferenceReading& reading) {
    const double x = transfer_fraction(reading);
    return CalibratedXi{principal_xi(x), 0, 0.0};
}

std::vector<CalibratedXi> calibrate_sweep(const std::vector<ReferenceReading>& readings,
                                          const CalibrateOptions& options) {
    if (readings.empty()) throw std::invalid_argument("calibrate_sweep: at least one reading required");
    if (!(options.monotone_tol >= 0.0))
        throw std::invalid_argument("calibrate_sweep: monotone_tol must be >= 0");

    const std::size_t n = readings.size();
    std::vector<std::vector<double>> candidates(n);
    for (std::size_t i = 0; i < n; ++i) {
        candidates[i] = branch_candidates(principal_xi(transfer_fraction(readings[i])), options.max_xi);
    }

    // Signed so that a positive step follows the declared direction.
    const double sign = options.direction == SweepDirection::decreasing ? -1.0 : 1.0;

    // Dynamic program over branch candidates. State (i, j) is reading i
    // unfolded to candidates[i][j]; transitions must not run against the
    // direction by more than monotone_tol.
    std::vector<std::vector<PathCost>> cost(n);
    std::vector<std::vector<int>> parent(n);
    cost[0].resize(candidates[0].size());
    parent[0].assign(candidates[0].size(), -1);
    for (std::size_t j = 0; j < candidates[0].size(); ++j)
        cost[0][j] = PathCost{0, 0.0, candidates[0][j]};

    for (std::size_t i = 1; i < n; ++i) {
        cost[i].resize(candidates[i].size());
        parent[i].assign(candidates[i].size(), -1);
        bool any_feasible = false;
        for (std::size_t j = 0; j < candidates[i].size(); ++j) {
            PathCost best;
            int best_parent = -1;
            for (std::size_t p = 0; p < candidates[i - 1].size(); ++p) {
                if (parent[i - 1][p] == -2) continue;  // unreachable
                const double step = sign * (candidates[i][j] - candidates[i - 1][p]);
                if (step < -options.monotone_tol) continue;
                PathCost c = cost[i - 1][p];
                c.violations += step < -kStrictTol ? 1 : 0;
                c.step_sq += step * step;
                c.xi_sum += candidates[i][j];
                if (best_parent < 0 || better(c, best)) {
                    best = c;
                    best_parent = static_cast<int>(p);
                }
            }
            if (best_parent < 0) {
                parent[i][j] = -2;
            } else {
                parent[i][j] = best_parent;
                cost[i][j] = best;
                any_feasible = true;
            }
        }
        if (!any_feasible) {
            std::ostringstream msg;
            msg << "calibrate_sweep: no branch assignment is monotone "
                << (options.direction == SweepDirection::decreasing ? "decreasing" : "increasing")
                << " within tol " << options.monotone_tol << "; first violating index " << i;
            throw std::runtime_error(msg.str());
        }
    }

    int best_end = -1;
    for (std::size_t j = 0; j < candidates[n - 1].size(); ++j) {
        if (parent[n - 1][j] == -2) continue;
        if (best_end < 0 || better(cost[n - 1][j], cost[n - 1][best_end]))
            best_end = static_cast<int>(j);
    }

    std::vector<CalibratedXi> result(n);
    int j = best_end;
    for (std::size_t i = n; i-- > 0;) {
        result[i].xi = candidates[i][j];
        result[i].branch = branch_of(result[i].xi);
        j = parent[i][j];
    }

    // Residual: deviation from the straight line through the neighbours.
    // Inflates where noise is amplified (d xi / d x diverges as x -> 1).
    if (n >= 3) {
        for (std::size_t i = 0; i < n; ++i) {
            double predicted;
            if (i == 0)
                predicted = 2.0 * result[1].xi - result[2].xi;
            else if (i == n - 1)
                predicted = 2.0 * result[n - 2].xi - result[n - 3].xi;
            else
                predicted = 0.5 * (result[i - 1].xi + result[i + 1].xi);
            result[i].residual = std::abs(result[i].xi - predicted);
        }
    }
    return result;
}

}  // namespace ctqw
