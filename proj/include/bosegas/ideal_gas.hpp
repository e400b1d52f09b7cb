#pragma once

#include <vector>

namespace bosegas {

enum class Phase { subcritical, condensed };

char const* to_string(Phase phase);

struct IdealGasSolution
{
    double f = 0.0;
    Phase phase = Phase::subcritical;
    double alpha = 0.0;
    /// Minimizing lambda_k = a_k / rho, k = 1..K (minimize_J only).
    std::vector<double> lambda_star;
    double rho_c = 0.0;
    double condensate_fraction = 0.0;
    /// Mass sum_k k a_k carried by the stored lambda_star.
    double truncated_mass = 0.0;
};

/// (4 pi beta)^{-d/2}
double thermal_density(double beta, int d);

/// zeta(d/2) (4 pi beta)^{-d/2}; +inf for d <= 2.
double critical_density(double beta, int d);

/// Root alpha >= 0 of rho = (4 pi beta)^{-d/2} Li_{d/2}(e^{-alpha}). Throws in the condensed phase.
double solve_alpha(double beta, double rho, int d);

IdealGasSolution free_energy_ideal(double beta, double rho, int d);

/*!
 * Minimizes J(lambda) over lambda in [0, inf)^K with sum_k k lambda_k <= 1.
 *
 * The minimizer has the form rho lambda_k = q_k e^{-alpha k}; alpha >= 0 is
 * the root of the truncated constraint, or 0 when the constraint is slack.
 * f = -q_bar / beta + J(lambda*) / beta, where lengths above K contribute
 * their q_k to J. The condensate fraction adds back the analytic mass of
 * lengths above K at the same alpha.
 */
IdealGasSolution minimize_J(double beta, double rho, int d, int k_trunc);

}  // namespace bosegas
