#include "bosegas/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace bosegas {

namespace {

// Number of leading terms summed explicitly before the Euler-Maclaurin tail.
constexpr int kHead = 200;

/// Upper incomplete gamma Gamma(a, x) for real a (a may be <= 0), x > 0.
double upper_gamma(double a, double x)
{
    if (a > 0.0)
    {
        return boost::math::tgamma(a, x);
    }
    if (a == 0.0)
    {
        return boost::math::expint(1, x);
    }
    // Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a
    return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

/// Integral of exp(-alpha x) x^{-s} over [m, inf).
double tail_integral(double s, double alpha, double m)
{
    if (alpha == 0.0)
    {
        return std::pow(m, 1.0 - s) / (s - 1.0);
    }
    return std::pow(alpha, s - 1.0) * upper_gamma(1.0 - s, alpha * m);
}

}  // namespace

double polylog_exp(double s, double alpha)
{
    if (!(alpha >= 0.0))
    {
        throw std::domain_error("polylog: argument z must lie in [0, 1]");
    }
    if (alpha == 0.0 && !(s > 1.0))
    {
        throw std::domain_error("polylog: Li_s(1) diverges for s <= 1");
    }
    if (std::isinf(alpha))
    {
        return 0.0;
    }

    auto term = [s, alpha](double n) { return std::exp(-alpha * n - s * std::log(n)); };

    if (alpha * kHead >= 40.0)
    {
        // geometric decay: the omitted tail is below z^n / (1 - z)
        double sum = 0.0;
        for (int n = 1;; ++n)
        {
            double t = term(n);
            sum += t;
            if (t <= 1e-18 * sum * -std::expm1(-alpha))
            {
                break;
            }
        }
        return sum;
    }

    double sum = 0.0;
    for (int n = 1; n < kHead; ++n)
    {
        sum += term(n);
    }
    double const m = kHead;
    double const h = term(m);
    double const u = alpha + s / m;
    double const h1 = -u * h;
    double const h3 = -(u * u * u + 3.0 * u * s / (m * m) + 2.0 * s / (m * m * m)) * h;
    double const tail = tail_integral(s, alpha, m) + 0.5 * h - h1 / 12.0 + h3 / 720.0;
    return sum + tail;
}

double polylog(double s, double z)
{
    if (!(z >= 0.0 && z <= 1.0))
    {
        throw std::domain_error("polylog: argument z must lie in [0, 1]");
    }
    if (z == 0.0)
    {
        return 0.0;
    }
    return polylog_exp(s, -std::log(z));
}

double zeta_fn(double s)
{
    if (!(s > 1.0))
    {
        throw std::domain_error("zeta: requires s > 1");
    }
    return polylog_exp(s, 0.0);
}

}  // namespace bosegas
