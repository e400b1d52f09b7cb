#include "bosegas/ideal_gas.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bosegas/special_functions.hpp"

namespace bosegas {

namespace {

void check_inputs(double beta, double rho, int d)
{
    if (!(beta > 0.0) || !(rho > 0.0))
    {
        throw std::invalid_argument("ideal gas: beta and rho must be > 0");
    }
    if (d < 1 || d > 3)
    {
        throw std::invalid_argument("ideal gas: d must be 1, 2 or 3");
    }
}

/// Root of the decreasing map alpha -> g(alpha) = target on [0, inf).
template<class F>
double bisect_decreasing(F g, double target)
{
    double lo = 0.0;
    double hi = 1.0;
    while (g(hi) > target)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6)
        {
            throw std::runtime_error("alpha bracket search failed");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it)
    {
        double const mid = 0.5 * (lo + hi);
        if (g(mid) > target)
        {
            lo = mid;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

char const* to_string(Phase phase)
{
    return phase == Phase::condensed ? "condensed" : "subcritical";
}

double thermal_density(double beta, int d)
{
    return std::pow(4.0 * std::numbers::pi * beta, -0.5 * d);
}

double critical_density(double beta, int d)
{
    if (d <= 2)
    {
        return std::numeric_limits<double>::infinity();
    }
    return zeta_fn(0.5 * d) * thermal_density(beta, d);
}

double solve_alpha(double beta, double rho, int d)
{
    check_inputs(beta, rho, d);
    double const rho_c = critical_density(beta, d);
    if (rho >= rho_c)
    {
        throw std::domain_error("solve_alpha: rho = " + std::to_string(rho) + " is at or above the critical density "
                                + std::to_string(rho_c) + " (condensed phase, no positive root)");
    }
    double const target = rho / thermal_density(beta, d);
    if (d == 2)
    {
        // Li_1(z) = -log(1 - z)
        return -std::log1p(-std::exp(-target));
    }
    double const s = 0.5 * d;
    return bisect_decreasing([s](double a) { return a > 0.0 ? polylog_exp(s, a) : std::numeric_limits<double>::infinity(); },
                             target);
}

IdealGasSolution free_energy_ideal(double beta, double rho, int d)
{
    check_inputs(beta, rho, d);
    IdealGasSolution sol;
    sol.rho_c = critical_density(beta, d);
    double const scale = thermal_density(beta, d);
    if (rho >= sol.rho_c)
    {
        sol.phase = Phase::condensed;
        sol.alpha = 0.0;
        sol.f = -scale * zeta_fn(1.0 + 0.5 * d) / beta;
        sol.condensate_fraction = 1.0 - sol.rho_c / rho;
        return sol;
    }
    sol.phase = Phase::subcritical;
    sol.alpha = solve_alpha(beta, rho, d);
    sol.f = -(scale * polylog_exp(1.0 + 0.5 * d, sol.alpha) + rho * sol.alpha) / beta;
    return sol;
}

IdealGasSolution minimize_J(double beta, double rho, int d, int k_trunc)
{
    check_inputs(beta, rho, d);
    if (k_trunc < 1)
    {
        throw std::invalid_argument("minimize_J: K_trunc must be >= 1");
    }
    double const scale = thermal_density(beta, d);
    double const s = 0.5 * d;
    auto const kk = static_cast<std::size_t>(k_trunc);
    std::vector<double> q(kk);
    for (std::size_t i = 0; i < kk; ++i)
    {
        q[i] = scale * std::pow(static_cast<double>(i + 1), -1.0 - s);
    }
    auto mass = [&q](double alpha) {
        double m = 0.0;
        for (std::size_t i = q.size(); i-- > 0;)
        {
            double const k = static_cast<double>(i + 1);
            m += k * q[i] * std::exp(-alpha * k);
        }
        return m;
    };

    IdealGasSolution sol;
    sol.rho_c = critical_density(beta, d);
    sol.alpha = mass(0.0) <= rho ? 0.0 : bisect_decreasing(mass, rho);

    double value = 0.0;
    double kept_q = 0.0;
    double kept_mass = 0.0;
    sol.lambda_star.resize(kk);
    for (std::size_t i = kk; i-- > 0;)
    {
        double const k = static_cast<double>(i + 1);
        double const a = q[i] * std::exp(-sol.alpha * k);
        sol.lambda_star[i] = a / rho;
        kept_q += q[i];
        kept_mass += k * a;
        // q - a + a log(a / q), with log(a / q) = -alpha k
        value += q[i] - a - a * sol.alpha * k;
    }
    double const q_bar = scale * zeta_fn(1.0 + s);
    // lengths above K are pinned at lambda_k = 0 and contribute q_k each
    value += q_bar - kept_q;
    sol.truncated_mass = kept_mass;
    sol.f = (-q_bar + value) / beta;

    // mass of lengths above K at the same alpha, from the full series
    double omitted = 0.0;
    if (sol.alpha > 0.0 || d >= 3)
    {
        double const full = sol.alpha > 0.0 ? polylog_exp(s, sol.alpha) : zeta_fn(s);
        omitted = std::max(0.0, scale * full - kept_mass);
    }
    else
    {
        omitted = std::numeric_limits<double>::infinity();
    }
    // a binding truncated constraint (alpha > 0) leaves no condensate
    double const fraction = sol.alpha > 0.0 ? 0.0 : 1.0 - (kept_mass + omitted) / rho;
    sol.condensate_fraction = fraction > 0.0 ? fraction : 0.0;
    sol.phase = fraction > 0.0 ? Phase::condensed : Phase::subcritical;
    return sol;
}

}  // namespace bosegas
