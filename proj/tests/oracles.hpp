// Test-only oracles, kept independent of the library's evolution path:
// a power-series Bessel J_n for the infinite-array solution, and small
// random generators for property tests.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <random>

namespace oracle {

/// J_n(x) by the ascending power series
///   J_n(x) = sum_m (-1)^m (x/2)^(n+2m) / (m! (n+m)!),
/// accurate to ~1e-15 for |x| <= 10. J_{-n} = (-1)^n J_n.
inline double bessel_j(int n, double x) {
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2 == 1) sign = -1.0;
    }
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= n; ++i) term *= half / i;  // (x/2)^n / n!
    double sum = term;
    for (int m = 1; m <= 80; ++m) {
        term *= -half * half / (static_cast<double>(m) * (n + m));
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
    }
    return sign * sum;
}

/// Random zero-diagonal symmetric nonnegative matrix (random couplings).
inline Eigen::MatrixXd random_symmetric_coupling(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < k; ++l) {
            const double v = uniform(rng);
            m(k, l) = v;
            m(l, k) = v;
        }
    return m;
}

/// Random strictly positive vector.
inline Eigen::VectorXd random_positive_vector(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(1e-3, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(rng);
    return v;
}

}  // namespace oracle
