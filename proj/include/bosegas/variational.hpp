#pragma once

#include <string>
#include <vector>

#include "bosegas/bridges.hpp"
#include "bosegas/estimator.hpp"
#include "bosegas/potentials.hpp"

namespace bosegas {

/// Intensities a_k (k = 1..K) of length-k cycle anchors per unit volume.
using IntensityVector = std::vector<double>;

struct DomainCheck
{
    bool inside = false;
    double thermal = 0.0;  // (4 pi beta)^{-d/2}
    double threshold = 0.0;  // rho exp(beta rho alpha(v))
    std::string diagnostic;

    explicit operator bool() const { return inside; }
};

/// (4 pi beta)^{-d/2} >= rho exp(beta rho alpha(v)).
DomainCheck in_domain_Dv(double beta, double rho, PairPotential const& p, int d);

/// (4 pi beta)^{-d/2} |box| / (N+1) exp(-N beta alpha(v) / |box|)
double quotient_lower_bound(int n, BoxSpec const& box, double beta, PairPotential const& p);

/// (rho / beta) log(rho (4 pi beta)^{d/2}) + rho^2 alpha(v)
double free_energy_upper_bound(double beta, double rho, PairPotential const& p, int d);

struct MonotonicityReport
{
    bool asserted = false;  // false outside D_v: nothing is checked
    std::string diagnostic;
    std::vector<EstimatorResult> z;  // z[i] estimates Z_{i+1}
    std::vector<bool> step_ok;       // Z_{i+2} >= Z_{i+1} within 3 sigma
    bool pass = false;
};

/// Estimates Z_1..Z_N in the fixed box with shared seeds and checks they do not decrease.
MonotonicityReport check_monotonicity(int n,
                                      BoxSpec const& box,
                                      PairPotential const& p,
                                      TimeGrid const& grid,
                                      McParams const& mc);

/// sum_{k<=K} [q_k - a_k + a_k log(a_k / q_k)], 0 log 0 = 0; a is zero-padded to the weights' K.
double entropy_rate_poisson(IntensityVector const& a, LengthWeights const& weights);

/// E[T_self] of a closed free bridge of k legs, k = 1..K.
struct SelfEnergyTable
{
    std::vector<double> mean;
    std::vector<double> stderr_;
};

/*!
 * Self-energy table by Monte Carlo. Bridges of length k get their own
 * streams keyed by k, so tables with different K share their prefix.
 * For k(k-1) above 64 ordered leg pairs, 64 pairs are drawn per bridge.
 */
SelfEnergyTable self_energy_table(int k_max, PairPotential const& p, TimeGrid const& grid, int d, McParams const& mc);

struct EnergyRate
{
    EstimatorResult self;
    EstimatorResult pair;
    EstimatorResult total;
};

/*!
 * <P_a, Phi_beta> for the Poisson field with intensities a.
 *
 * Self term: sum_k a_k E[T_self(k)] (MC). Pair term:
 * sum_{k,k'} a_k a_k' E[int T_{k,k'}(z) dz] by MC: lengths drawn in
 * proportion to k a_k, one leg pair drawn uniformly, and the displacement z
 * drawn from a multivariate Cauchy proposal around the leg offset.
 */
EnergyRate energy_rate_poisson(IntensityVector const& a,
                               PairPotential const& p,
                               TimeGrid const& grid,
                               int d,
                               McParams const& mc);

/// Pair term in closed form: (beta alpha(v) / 2) (sum_k k a_k)^2.
double pair_energy_analytic(IntensityVector const& a, PairPotential const& p, double beta, int d);

enum class ChiMode { le, eq };

char const* to_string(ChiMode mode);
ChiMode parse_chi_mode(std::string const& name);

struct ChiOptions
{
    int k_max = 64;
    McParams mc{400, 1, 1, 1000000};
    int max_iterations = 400;
    double tolerance = 1e-14;
};

struct ChiResult
{
    double value = 0.0;          // upper bound on chi over the Poisson family
    double value_stderr = 0.0;   // MC envelope from the self-energy table
    IntensityVector a;
    double mass = 0.0;           // sum_k k a_k
    double multiplier = 0.0;     // mu >= 0 in le mode
    double f_upper = 0.0;        // -q_bar / beta + value / beta
    double tail_q = 0.0;         // sum_{k>K} q_k, entering value unchanged
    double tail_mass = 0.0;      // sum_{k>K} k q_k e^{-k nu}: mass the truncation forbids
    int iterations = 0;
    bool converged = false;
};

/*!
 * Minimizes entropy_rate + energy_rate over Poisson intensities a in
 * [0, inf)^K with sum_k k a_k <= rho (le) or == rho (eq).
 *
 * With the self table s_k fixed, the pair term depends on a only through
 * m = sum_k k a_k and the problem is strictly convex. Stationarity gives
 * a_k = q_k exp(-s_k - k nu) with nu = beta alpha(v) m + mu, so the
 * minimizer is found by bisection on nu. At v = 0 this is the ideal-gas
 * solution exactly.
 */
ChiResult optimize_chi_restricted(double beta,
                                  double rho,
                                  PairPotential const& p,
                                  TimeGrid const& grid,
                                  int d,
                                  ChiMode mode,
                                  ChiOptions const& options);

/// Objective at a given a, using the same self table the optimizer would build.
double chi_objective(IntensityVector const& a,
                     LengthWeights const& weights,
                     SelfEnergyTable const& self,
                     double pair_coefficient);

}  // namespace bosegas
