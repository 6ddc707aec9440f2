// Recovery of the normalized propagation xi from the reference-pair
// powers. An isolated two-guide coupler transfers sin^2(gamma z) of the
// injected power to its partner, so a single reading pins gamma z only up
// to the arcsin ambiguity gamma z = m*pi +/- arcsin(sqrt(x)). A strain
// sweep is unfolded across branches using the monotone dependence of
// gamma on strain.
#pragma once

#include <cstddef>
#include <vector>

namespace ctqw {

/// One reference-pair measurement: power remaining in the injected guide
/// and power transferred to its partner (arbitrary common units).
struct ReferenceReading {
    double p_bar = 0.0;
    double p_cross = 0.0;
};

/// Recovered normalized propagation. branch counts the monotonic segments
/// of sin^2(pi xi / 2) folded through (floor of xi), residual is a local
/// roughness diagnostic of the unfolded sweep (0 for isolated readings).
struct CalibratedXi {
    double xi = 0.0;
    int branch = 0;
    double residual = 0.0;
};

enum class SweepDirection { decreasing, increasing };

struct CalibrateOptions {
    SweepDirection direction = SweepDirection::decreasing;
    /// Slack allowed against the declared monotone direction, in xi units.
    /// Covers measurement noise; branch steps are far larger.
    double monotone_tol = 0.1;
    /// Largest xi considered when enumerating branch candidates.
    double max_xi = 6.0;
};

/// Principal-branch inversion of one reading: x = p_cross/(p_bar+p_cross),
/// xi = (2/pi) arcsin(sqrt(x)) in [0, 1]. Readings within 1e-6 of full or
/// zero transfer clamp to the boundary. Scale-invariant in the powers.
CalibratedXi xi_from_reference(const ReferenceReading& reading);

/// Unfolds a strain-ordered sweep of readings across arcsin branches so
/// the xi sequence is monotone in the declared direction (stretching
/// decreases gamma, hence decreasing). Among consistent unfoldings it
/// selects, in order: fewest strict direction violations, smallest total
/// squared step, smallest xi values. Throws std::runtime_error naming the
/// first violating index when no branch assignment is monotone within
/// monotone_tol.
std::vector<CalibratedXi> calibrate_sweep(const std::vector<ReferenceReading>& readings,
                                          const CalibrateOptions& options = {});

}  // namespace ctqw
