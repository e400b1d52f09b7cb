#include "bosegas/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "bosegas/cycle_expansion.hpp"
#include "bosegas/ideal_gas.hpp"
#include "bosegas/parallel.hpp"
#include "bosegas/poisson_field.hpp"
#include "bosegas/special_functions.hpp"

namespace bosegas {

namespace {

constexpr std::uint64_t kSelfTag = 0x73656c66ULL;
constexpr std::uint64_t kPairTag = 0x70616972ULL;
constexpr int kMaxLegPairs = 64;

double finite_alpha(PairPotential const& p, int d, char const* where)
{
    double const alpha = alpha_v(p, d);
    if (!std::isfinite(alpha))
    {
        throw std::domain_error(std::string(where) + ": alpha(v) is infinite");
    }
    return alpha;
}

/// Length scale of the potential for the displacement proposal.
double potential_scale(PairPotential const& p)
{
    struct Visitor
    {
        double operator()(potential::Zero const&) const { return 1.0; }
        double operator()(potential::Gaussian const& g) const { return g.width; }
        double operator()(potential::CompactStep const& s) const { return s.radius; }
        double operator()(potential::InversePower const& ip) const { return std::max(ip.hard_core, 1.0); }
        double operator()(potential::Tabulated const& t) const { return t.r.empty() ? 1.0 : t.r.back(); }
    };
    return std::visit(Visitor{}, p.family());
}

double cauchy_density(Point const& u, double scale, int d)
{
    double r2 = 0.0;
    for (int a = 0; a < d; ++a)
    {
        r2 += u[a] * u[a];
    }
    double const norm = std::tgamma(0.5 * (1.0 + d)) / (std::pow(std::numbers::pi, 0.5 * (d + 1)) * std::pow(scale, d));
    return norm * std::pow(1.0 + r2 / (scale * scale), -0.5 * (1.0 + d));
}

/// Leg-pair integral between leg i of f and leg j of g displaced by z.
double leg_integral(std::vector<Point> const& f,
                    int i,
                    std::vector<Point> const& g,
                    int j,
                    Point const& z,
                    PairPotential const& p,
                    TimeGrid const& grid)
{
    int const n = grid.slices;
    auto value = [&](int m) {
        auto const& x = f[static_cast<std::size_t>(i * n + m)];
        auto const& y = g[static_cast<std::size_t>(j * n + m)];
        double const dx = x[0] - y[0] - z[0];
        double const dy = x[1] - y[1] - z[1];
        double const dz = x[2] - y[2] - z[2];
        return p(std::sqrt(dx * dx + dy * dy + dz * dz));
    };
    double sum = 0.5 * (value(0) + value(n));
    for (int m = 1; m < n; ++m)
    {
        sum += value(m);
    }
    return sum * grid.step();
}

}  // namespace

DomainCheck in_domain_Dv(double beta, double rho, PairPotential const& p, int d)
{
    DomainCheck c;
    c.thermal = thermal_density(beta, d);
    double const alpha = alpha_v(p, d);
    if (!std::isfinite(alpha))
    {
        c.inside = false;
        c.threshold = std::numeric_limits<double>::infinity();
        c.diagnostic = "alpha(v) is infinite; the domain is empty";
        return c;
    }
    c.threshold = rho * std::exp(beta * rho * alpha);
    c.inside = c.thermal >= c.threshold;
    c.diagnostic = c.inside ? "inside" : "outside";
    return c;
}

double quotient_lower_bound(int n, BoxSpec const& box, double beta, PairPotential const& p)
{
    double const alpha = finite_alpha(p, box.d, "quotient_lower_bound");
    double const volume = box.volume();
    return thermal_density(beta, box.d) * volume / (n + 1.0) * std::exp(-n * beta * alpha / volume);
}

double free_energy_upper_bound(double beta, double rho, PairPotential const& p, int d)
{
    double const alpha = finite_alpha(p, d, "free_energy_upper_bound");
    return rho / beta * std::log(rho / thermal_density(beta, d)) + rho * rho * alpha;
}

MonotonicityReport check_monotonicity(int n,
                                      BoxSpec const& box,
                                      PairPotential const& p,
                                      TimeGrid const& grid,
                                      McParams const& mc)
{
    MonotonicityReport rep;
    double const rho = n / box.volume();
    auto const domain = in_domain_Dv(grid.beta, rho, p, box.d);
    if (!domain.inside)
    {
        rep.diagnostic = "not asserted by paper; skipped (" + domain.diagnostic + " D_v)";
        return rep;
    }
    rep.asserted = true;
    auto const weights = cycle_weights(box, grid.beta, n);
    for (int m = 1; m <= n; ++m)
    {
        rep.z.push_back(estimate_Z_poisson(m, box, p, grid, weights, mc));
    }
    rep.pass = true;
    for (std::size_t i = 0; i + 1 < rep.z.size(); ++i)
    {
        double const se = std::hypot(rep.z[i].stderr_, rep.z[i + 1].stderr_);
        bool const ok = rep.z[i + 1].mean >= rep.z[i].mean - 3.0 * se;
        rep.step_ok.push_back(ok);
        rep.pass = rep.pass && ok;
    }
    rep.diagnostic = rep.pass ? "nondecreasing" : "decrease beyond 3 sigma";
    return rep;
}

double entropy_rate_poisson(IntensityVector const& a, LengthWeights const& weights)
{
    if (static_cast<int>(a.size()) > weights.k_max())
    {
        throw std::invalid_argument("entropy_rate_poisson: intensities extend beyond the weights' K_max");
    }
    double sum = 0.0;
    for (int k = weights.k_max(); k >= 1; --k)
    {
        double const q = weights[k];
        double const ak = k <= static_cast<int>(a.size()) ? a[static_cast<std::size_t>(k - 1)] : 0.0;
        if (ak < 0.0)
        {
            throw std::invalid_argument("entropy_rate_poisson: intensities must be nonnegative");
        }
        sum += q - ak + (ak > 0.0 ? ak * std::log(ak / q) : 0.0);
    }
    return sum;
}

SelfEnergyTable self_energy_table(int k_max, PairPotential const& p, TimeGrid const& grid, int d, McParams const& mc)
{
    SelfEnergyTable table;
    table.mean.assign(static_cast<std::size_t>(k_max), 0.0);
    table.stderr_.assign(static_cast<std::size_t>(k_max), 0.0);
    if (p.is_zero())
    {
        return table;
    }
    Point const origin{};
    for (int k = 2; k <= k_max; ++k)
    {
        std::vector<double> values(mc.samples);
        parallel_for(mc.samples, mc.threads, [&](std::size_t s) {
            RandomStream rng(mc.seed, {kSelfTag, static_cast<std::uint64_t>(k), s});
            std::vector<Point> path;
            sample_free_bridge_path(origin, origin, d, k * grid.slices, grid.step(), rng, path);
            Point const none{};
            long const ordered = static_cast<long>(k) * (k - 1);
            double sum = 0.0;
            if (ordered <= kMaxLegPairs)
            {
                for (int i = 0; i < k; ++i)
                {
                    for (int j = i + 1; j < k; ++j)
                    {
                        sum += 2.0 * leg_integral(path, i, path, j, none, p, grid);
                    }
                }
            }
            else
            {
                for (int t = 0; t < kMaxLegPairs; ++t)
                {
                    auto const i = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
                    auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(k - 1));
                    j += j >= i ? 1 : 0;
                    sum += leg_integral(path, i, path, j, none, p, grid);
                }
                sum *= static_cast<double>(ordered) / kMaxLegPairs;
            }
            values[s] = 0.5 * sum;
        });
        auto const r = summarize(values, mc.seed);
        table.mean[static_cast<std::size_t>(k - 1)] = r.mean;
        table.stderr_[static_cast<std::size_t>(k - 1)] = r.stderr_;
    }
    return table;
}

double pair_energy_analytic(IntensityVector const& a, PairPotential const& p, double beta, int d)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        m += static_cast<double>(i + 1) * a[i];
    }
    if (m == 0.0 || p.is_zero())
    {
        return 0.0;
    }
    return 0.5 * beta * finite_alpha(p, d, "pair_energy_analytic") * m * m;
}

EnergyRate energy_rate_poisson(IntensityVector const& a,
                               PairPotential const& p,
                               TimeGrid const& grid,
                               int d,
                               McParams const& mc)
{
    EnergyRate out;
    out.self = EstimatorResult::exact_value(0.0);
    out.pair = EstimatorResult::exact_value(0.0);
    out.total = EstimatorResult::exact_value(0.0);
    int const k_max = static_cast<int>(a.size());
    double m = 0.0;
    std::vector<double> mass(a.size());
    for (int k = 1; k <= k_max; ++k)
    {
        double const ak = a[static_cast<std::size_t>(k - 1)];
        if (ak < 0.0)
        {
            throw std::invalid_argument("energy_rate_poisson: intensities must be nonnegative");
        }
        mass[static_cast<std::size_t>(k - 1)] = k * ak;
        m += k * ak;
    }
    if (p.is_zero() || m == 0.0)
    {
        return out;
    }
    finite_alpha(p, d, "energy_rate_poisson");

    auto const table = self_energy_table(k_max, p, grid, d, mc);
    double self = 0.0;
    double self_var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        self += a[i] * table.mean[i];
        self_var += a[i] * a[i] * table.stderr_[i] * table.stderr_[i];
    }
    out.self = EstimatorResult{self, std::sqrt(self_var), mc.samples, mc.seed, false};

    double const scale = std::hypot(potential_scale(p), std::sqrt(2.0 * grid.beta));
    Point const origin{};
    std::vector<double> values(mc.samples);
    parallel_for(mc.samples, mc.threads, [&](std::size_t s) {
        RandomStream rng(mc.seed, {kPairTag, s});
        std::discrete_distribution<int> pick(mass.begin(), mass.end());
        int const k = pick(rng) + 1;
        int const k2 = pick(rng) + 1;
        std::vector<Point> f;
        std::vector<Point> g;
        sample_free_bridge_path(origin, origin, d, k * grid.slices, grid.step(), rng, f);
        sample_free_bridge_path(origin, origin, d, k2 * grid.slices, grid.step(), rng, g);
        auto const i = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
        auto const j = static_cast<int>(rng() % static_cast<std::uint64_t>(k2));
        auto const& fi = f[static_cast<std::size_t>(i * grid.slices)];
        auto const& gj = g[static_cast<std::size_t>(j * grid.slices)];
        Point u{};
        double const w = rng.normal();
        for (int c = 0; c < d; ++c)
        {
            u[c] = scale * rng.normal() / std::abs(w);
        }
        Point z{};
        for (int c = 0; c < d; ++c)
        {
            z[c] = fi[c] - gj[c] + u[c];
        }
        double const integral = leg_integral(f, i, g, j, z, p, grid);
        values[s] = 0.5 * m * m * integral / cauchy_density(u, scale, d);
    });
    out.pair = summarize(values, mc.seed);
    out.total.mean = out.self.mean + out.pair.mean;
    out.total.stderr_ = std::hypot(out.self.stderr_, out.pair.stderr_);
    out.total.samples = mc.samples;
    out.total.seed = mc.seed;
    out.total.exact = false;
    return out;
}

char const* to_string(ChiMode mode)
{
    return mode == ChiMode::le ? "le" : "eq";
}

ChiMode parse_chi_mode(std::string const& name)
{
    if (name == "le")
    {
        return ChiMode::le;
    }
    if (name == "eq")
    {
        return ChiMode::eq;
    }
    throw std::invalid_argument("unknown chi mode '" + name + "' (expected le or eq)");
}

double chi_objective(IntensityVector const& a,
                     LengthWeights const& weights,
                     SelfEnergyTable const& self,
                     double pair_coefficient)
{
    double value = entropy_rate_poisson(a, weights);
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        value += a[i] * self.mean[i];
        m += static_cast<double>(i + 1) * a[i];
    }
    return value + 0.5 * pair_coefficient * m * m;
}

ChiResult optimize_chi_restricted(double beta,
                                  double rho,
                                  PairPotential const& p,
                                  TimeGrid const& grid,
                                  int d,
                                  ChiMode mode,
                                  ChiOptions const& options)
{
    if (!(rho > 0.0) || !(beta > 0.0))
    {
        throw std::invalid_argument("optimize_chi_restricted: beta and rho must be > 0");
    }
    int const K = options.k_max;
    if (K < 1)
    {
        throw std::invalid_argument("optimize_chi_restricted: K_max must be >= 1");
    }
    double const coupling = p.is_zero() ? 0.0 : beta * finite_alpha(p, d, "optimize_chi_restricted");
    auto const weights = length_weights(beta, d, BoundaryCondition::empty, 0.0, K);
    auto const self = self_energy_table(K, p, grid, d, options.mc);

    std::vector<double> log_base(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k)
    {
        log_base[static_cast<std::size_t>(k - 1)] = std::log(weights[k]) - self.mean[static_cast<std::size_t>(k - 1)];
    }
    auto intensities = [&](double nu) {
        IntensityVector a(static_cast<std::size_t>(K));
        for (int k = 1; k <= K; ++k)
        {
            double const e = log_base[static_cast<std::size_t>(k - 1)] - k * nu;
            // beyond the double range the mass is infinite, which still orders the bisection
            a[static_cast<std::size_t>(k - 1)] = e > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(e);
        }
        return a;
    };
    auto mass_of = [](IntensityVector const& a) {
        double m = 0.0;
        for (std::size_t i = a.size(); i-- > 0;)
        {
            m += static_cast<double>(i + 1) * a[i];
        }
        return m;
    };
    // residual of the fixed point nu = coupling * m(nu) + mu, decreasing in nu
    auto solve = [&](auto residual, int& iterations) {
        double lo = -1.0;
        double hi = 1.0;
        while (residual(lo) < 0.0)
        {
            hi = lo;
            lo *= 2.0;
            if (lo < -1e3)
            {
                throw std::runtime_error("optimize_chi_restricted: no lower bracket");
            }
        }
        while (residual(hi) > 0.0)
        {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e6)
            {
                throw std::runtime_error("optimize_chi_restricted: no upper bracket");
            }
        }
        iterations = 0;
        while (iterations < options.max_iterations && hi - lo > options.tolerance * (1.0 + std::abs(lo)))
        {
            double const mid = 0.5 * (lo + hi);
            (residual(mid) > 0.0 ? lo : hi) = mid;
            ++iterations;
        }
        return 0.5 * (lo + hi);
    };

    ChiResult res;
    int iterations = 0;
    double nu = 0.0;
    double mu = 0.0;
    bool constrained = true;
    if (mode == ChiMode::le)
    {
        // unconstrained minimizer: nu = coupling * m(nu)
        double const nu0 = solve(
            [&](double x) { return coupling > 0.0 ? coupling * mass_of(intensities(x)) - x : -x; }, iterations);
        if (mass_of(intensities(nu0)) <= rho)
        {
            nu = nu0;
            constrained = false;
        }
    }
    if (constrained)
    {
        int more = 0;
        nu = solve([&](double x) { return mass_of(intensities(x)) - rho; }, more);
        iterations += more;
        mu = nu - coupling * rho;
    }
    res.converged = iterations < 2 * options.max_iterations;
    res.iterations = iterations;
    res.a = intensities(nu);
    res.mass = mass_of(res.a);
    res.multiplier = mu;

    double const q_bar = thermal_density(beta, d) * zeta_fn(1.0 + 0.5 * d);
    res.tail_q = std::max(0.0, q_bar - weights.q_bar);
    if (nu > 0.0)
    {
        double const full = thermal_density(beta, d) * polylog_exp(0.5 * d, nu);
        double kept = 0.0;
        for (int k = K; k >= 1; --k)
        {
            kept += k * weights[k] * std::exp(-k * nu);
        }
        res.tail_mass = std::max(0.0, full - kept);
    }
    else
    {
        res.tail_mass = std::numeric_limits<double>::infinity();
    }
    res.value = chi_objective(res.a, weights, self, coupling) + res.tail_q;
    double var = 0.0;
    for (std::size_t i = 0; i < res.a.size(); ++i)
    {
        var += res.a[i] * res.a[i] * self.stderr_[i] * self.stderr_[i];
    }
    res.value_stderr = std::sqrt(var);
    res.f_upper = (-q_bar + res.value) / beta;
    return res;
}

}  // namespace bosegas
