#pragma once

namespace bosegas {

/// Riemann zeta for real s > 1, absolute error below 1e-12.
double zeta_fn(double s);

/*!
 * Polylogarithm Li_s(z) = sum_{k>=1} z^k / k^s for real z in [0, 1].
 *
 * Computed by direct summation of the first terms plus an Euler-Maclaurin
 * tail (integral + boundary corrections) for the remainder; z = 1 requires
 * s > 1. Absolute error below 1e-12.
 */
double polylog(double s, double z);

/// Li_s(exp(-alpha)) for alpha >= 0, without forming exp(-alpha) near 1.
double polylog_exp(double s, double alpha);

}  // namespace bosegas
