// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bosegas/bridges.hpp"
#include "bosegas/cycle_expansion.hpp"
#include "bosegas/empirical_field.hpp"
#include "bosegas/ideal_gas.hpp"
#include "bosegas/poisson_field.hpp"
#include "bosegas/special_functions.hpp"
#include "bosegas/variational.hpp"
#include "oracles.hpp"
#include "stats.hpp"

using namespace bosegas;

namespace {

struct Outcome
{
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, std::string const& what)
    {
        if (!ok)
        {
            pass = false;
            notes.push_back(what);
        }
    }
};

std::string fmt(char const* pattern, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

double thermal(double beta, int d)
{
    return std::pow(4.0 * std::numbers::pi * beta, -0.5 * d);
}

MarkedConfiguration random_configuration(int d, double L, double beta, int slices, std::uint64_t seed, std::uint64_t id)
{
    BoxSpec const box(d, L, BoundaryCondition::empty);
    TimeGrid const grid(beta, slices);
    auto const w = length_weights(beta, d, BoundaryCondition::empty, 0.0, 6);
    RandomStream rng(seed, {id});
    auto omega = sample_marked_poisson(box, w, grid, rng);
    for (int extra = 0; extra < 3; ++extra)
    {
        Point x = box.uniform_point(rng);
        for (int a = 0; a < d; ++a)
        {
            if (rng.uniform() < 0.5)
            {
                x[a] = (rng.uniform() < 0.5 ? -0.5 : 0.5) * L * (1.0 - 1e-9 * rng.uniform());
            }
        }
        omega.particles.push_back(sample_bridge(x, 1 + static_cast<int>(rng() % 3), grid, box, rng));
    }
    return omega;
}

// 1. minimize_J against the closed form
Outcome ideal_equivalence()
{
    Outcome out;
    double const condensed = -std::pow(4.0 * std::numbers::pi, -1.5) * zeta_fn(2.5);
    for (double rho : {0.03, 0.0586, 0.12})
    {
        double const closed = free_energy_ideal(1.0, rho, 3).f;
        double const variational = minimize_J(1.0, rho, 3, 2000).f;
        out.require(std::abs(closed - variational) < 1e-5,
                    fmt("rho=%g: |J - closed| = %.3e", rho, std::abs(closed - variational)));
    }
    for (double rho : {0.0587, 0.1, 0.12, 0.5})
    {
        double const f = free_energy_ideal(1.0, rho, 3).f;
        out.require(std::abs(f - condensed) < 1e-14, fmt("rho=%g: condensed f differs from -q_bar by %.3e", rho, f - condensed));
    }
    out.require(std::abs(critical_density(1.0, 3) - 5.8638e-2) < 1e-5, "rho_c away from 5.8638e-2");
    return out;
}

// 2. combinatorial backbone at v = 0
Outcome combinatorial_backbone()
{
    Outcome out;
    std::uint64_t factorial = 1;
    for (int n = 1; n <= 12; ++n)
    {
        factorial *= static_cast<std::uint64_t>(n);
        std::uint64_t sum = 0;
        for (auto const& lambda : integer_partitions(n))
        {
            sum += class_size(lambda);
        }
        out.require(sum == factorial, "class sizes do not sum to N! at N=" + std::to_string(n));
    }
    TimeGrid const grid(1.0, 16);
    for (double volume : {1.0, 10.0, 100.0})
    {
        auto const box = BoxSpec::with_volume(3, volume, BoundaryCondition::empty);
        auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 20);
        std::vector<double> c(20);
        for (int k = 1; k <= 20; ++k)
        {
            c[static_cast<std::size_t>(k - 1)] = volume * w[k];
        }
        auto const series = test::exp_series(c, 20);
        for (int n = 1; n <= 20; ++n)
        {
            double enumerated = 0.0;
            for (auto const& lambda : integer_partitions(n))
            {
                enumerated += partition_weight(lambda, volume, w);
            }
            double const dp = LengthConstraintDP(volume, w, n).weight_sum();
            double const cyc = Z_cycle(n, box, PairPotential::zero(), grid, {}).mean;
            double const poi = estimate_Z_poisson(n, box, PairPotential::zero(), grid, w, {}).mean;
            for (double v : {dp, cyc, poi, series[static_cast<std::size_t>(n)]})
            {
                double const rel = std::abs(v - enumerated) / enumerated;
                out.require(rel <= 1e-12, fmt("|box|=%g N=%g: relative gap %.3e", volume, n, rel));
            }
        }
    }
    return out;
}

// 3. three routes with a soft Gaussian
Outcome three_routes()
{
    Outcome out;
    TimeGrid const grid(1.0, 16);
    auto const p = PairPotential::gaussian(1.0, 1.0);
    auto const box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::periodic);
    for (int n = 1; n <= 4; ++n)
    {
        McParams const mc{100000, 1000 + static_cast<std::uint64_t>(n), 1, 1000000};
        McParams mc2 = mc;
        mc2.seed += 100;
        McParams mc3 = mc;
        mc3.seed += 200;
        auto const brute = Z_bruteforce_perm(n, box, p, grid, mc);
        auto const cyc = Z_cycle(n, box, p, grid, mc2);
        auto const poi = estimate_Z_poisson(n, box, p, grid, cycle_weights(box, 1.0, n), mc3);
        std::printf("    N=%d  perm %.6g +- %.2g  cycle %.6g +- %.2g  poisson %.6g +- %.2g\n", n, brute.mean, brute.stderr_,
                    cyc.mean, cyc.stderr_, poi.mean, poi.stderr_);
        out.require(z_score(brute, cyc) < 3.0, fmt("N=%g perm vs cycle z=%.2f", n, z_score(brute, cyc)));
        out.require(z_score(brute, poi) < 3.0, fmt("N=%g perm vs poisson z=%.2f", n, z_score(brute, poi)));
        out.require(z_score(cyc, poi) < 3.0, fmt("N=%g cycle vs poisson z=%.2f", n, z_score(cyc, poi)));
    }
    return out;
}

// 4. mark-length identity for the empirical field
Outcome mark_length_identity()
{
    Outcome out;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i)
    {
        int const d = 1 + static_cast<int>(i % 3);
        double const L = 1.2 + 0.004 * static_cast<double>(i % 997);
        try
        {
            auto const both = field_pair_length(random_configuration(d, L, 0.2, 2, 4, i));
            worst = std::max(worst, std::abs(both.via_overlaps - both.via_count));
        }
        catch (std::logic_error const& e)
        {
            out.require(false, e.what());
        }
    }
    out.require(worst <= 1e-12, fmt("largest gap %.3e", worst));
    std::printf("    largest |overlap route - count route| = %.3e\n", worst);
    return out;
}

// 5. both Hamiltonian bounds
Outcome hamiltonian_bounds()
{
    Outcome out;
    TimeGrid const grid(0.3, 4);
    auto const step = PairPotential::compact_step(2.0, 0.8);
    int upper_fail = 0;
    int lower_fail = 0;
    double min_upper_gap = INFINITY;
    double min_lower_slack = INFINITY;
    TruncationParams const params{3.0, 10.0, 8, 20};
    for (std::uint64_t i = 0; i < 1000; ++i)
    {
        auto const omega = random_configuration(3, 5.5, 0.3, 4, 5, i);
        double const H = hamiltonian(omega, step, grid);
        double const phi = field_pair_phi(omega, step, grid);
        min_upper_gap = std::min(min_upper_gap, phi - H);
        upper_fail += H <= phi * (1.0 + 1e-12) ? 0 : 1;

        auto const rep = check_hamiltonian_lower_bound(omega, params, step, grid);
        min_lower_slack = std::min(min_lower_slack, rep.slack);
        lower_fail += rep.holds ? 0 : 1;
    }
    std::printf("    min (|L|<R,Phi> - H) = %.4g, min lower-bound slack = %.4g\n", min_upper_gap, min_lower_slack);
    out.require(upper_fail == 0, std::to_string(upper_fail) + " configurations violate H <= |L|<R,Phi>");
    out.require(lower_fail == 0, std::to_string(lower_fail) + " configurations violate the lower bound");
    return out;
}

// 6. quotient bound, monotonicity and boundary sandwich
Outcome quotient_monotonicity_sandwich()
{
    Outcome out;
    TimeGrid const grid(1.0, 8);
    auto const p = PairPotential::gaussian(1.0, 1.0);

    auto const box = BoxSpec::with_volume(3, 50.0, BoundaryCondition::periodic);
    auto const weights = cycle_weights(box, 1.0, 7);
    McParams const mc{20000, 61, 1, 1000000};
    auto previous = estimate_Z_poisson(1, box, p, grid, weights, mc);
    for (int n = 1; n <= 6; ++n)
    {
        auto const next = estimate_Z_poisson(n + 1, box, p, grid, weights, mc);
        double const ratio = next.mean / previous.mean;
        double const se = ratio * std::hypot(next.stderr_ / next.mean, previous.stderr_ / previous.mean);
        double const bound = quotient_lower_bound(n, box, 1.0, p);
        std::printf("    N=%d  Z_{N+1}/Z_N = %.6g +- %.2g  bound %.6g\n", n, ratio, se, bound);
        out.require(ratio + 3.0 * se >= bound, fmt("N=%g: ratio %.6g below bound %.6g", n, ratio, bound));
        previous = next;
    }

    auto const mono = check_monotonicity(6, BoxSpec::with_volume(3, 600.0, BoundaryCondition::periodic), p, grid,
                                         {20000, 67, 1, 1000000});
    out.require(mono.asserted, "monotonicity point unexpectedly outside D_v");
    out.require(mono.pass, "Z_N decreases beyond 3 sigma: " + mono.diagnostic);

    for (int n = 1; n <= 3; ++n)
    {
        McParams const smc{40000, 71 + static_cast<std::uint64_t>(n), 1, 1000000};
        auto const free = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, n);
        auto const dir_box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::dirichlet);
        auto const emp_box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::empty);
        auto const per_box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::periodic);
        auto const zd = estimate_Z_poisson(n, dir_box, p, grid, free, smc);
        auto const ze = estimate_Z_poisson(n, emp_box, p, grid, free, smc);
        auto const zp = estimate_Z_poisson(n, per_box, p, grid, cycle_weights(per_box, 1.0, n), smc);
        std::printf("    N=%d  Z^Dir %.6g  Z^empty %.6g  Z^per %.6g\n", n, zd.mean, ze.mean, zp.mean);
        out.require(zd.mean <= ze.mean + 3.0 * std::hypot(zd.stderr_, ze.stderr_), fmt("N=%g: Z^Dir > Z^empty", n));
        out.require(ze.mean <= zp.mean + 3.0 * std::hypot(ze.stderr_, zp.stderr_), fmt("N=%g: Z^empty > Z^per", n));
    }
    return out;
}

// 7. bridge law
Outcome bridge_law()
{
    Outcome out;
    {
        TimeGrid const grid(1.0, 16);
        BoxSpec const box(3, 1.0, BoundaryCondition::empty);
        test::Moments m[3];
        for (std::size_t i = 0; i < 100000; ++i)
        {
            RandomStream rng(701, {i});
            auto const f = sample_bridge({}, 1, grid, box, rng);
            for (int a = 0; a < 3; ++a)
            {
                m[a].add(f.positions[8][a] * f.positions[8][a]);
            }
        }
        for (int a = 0; a < 3; ++a)
        {
            double const z = std::abs(m[a].mean() - 0.5) / m[a].stderr_();
            std::printf("    midpoint variance axis %d: %.5f (z=%.2f)\n", a, m[a].mean(), z);
            out.require(z < 4.0, fmt("midpoint variance axis %g: z=%.2f", a, z));
        }
    }
    {
        TimeGrid const grid(1.0, 4);
        BoxSpec const box(1, 1.0, BoundaryCondition::empty);
        int const probes[3] = {2, 4, 6};
        test::Moments dm[3], gm[3], dc[3][3], gc[3][3];
        for (std::size_t i = 0; i < 100000; ++i)
        {
            RandomStream r1(702, {i});
            auto const f = sample_bridge({}, 2, grid, box, r1);
            RandomStream r2(703, {i});
            Point const y{std::sqrt(grid.beta) * r2.normal(), 0.0, 0.0};
            auto const first = sample_open_bridge({}, y, grid, box, r2);
            auto const back = sample_open_bridge(y, {}, grid, box, r2);
            auto glued = [&](int j) {
                return j <= grid.slices ? first.positions[static_cast<std::size_t>(j)][0]
                                        : back.positions[static_cast<std::size_t>(j - grid.slices)][0];
            };
            for (int a = 0; a < 3; ++a)
            {
                dm[a].add(f.positions[probes[a]][0]);
                gm[a].add(glued(probes[a]));
                for (int b = a; b < 3; ++b)
                {
                    dc[a][b].add(f.positions[probes[a]][0] * f.positions[probes[b]][0]);
                    gc[a][b].add(glued(probes[a]) * glued(probes[b]));
                }
            }
        }
        double worst = 0.0;
        for (int a = 0; a < 3; ++a)
        {
            worst = std::max(worst, test::z_score(dm[a], gm[a]));
            for (int b = a; b < 3; ++b)
            {
                worst = std::max(worst, test::z_score(dc[a][b], gc[a][b]));
            }
        }
        std::printf("    concatenation: largest z = %.2f\n", worst);
        out.require(worst < 4.0, fmt("concatenation z=%.2f", worst));
    }
    {
        auto const free = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 50);
        auto const per = length_weights(1.0, 3, BoundaryCondition::periodic, 10.0, 50);
        double const gap = per[1] - free[1];
        out.require(gap >= 0.0 && gap <= 1e-10 * free[1], fmt("periodic excess of q_1 %.3e", gap / free[1]));
        std::printf("    periodic excess q_1: %.3e relative\n", (per[1] - free[1]) / free[1]);
    }
    {
        McParams const mc{40000, 704, 1, 1000000};
        double previous = 0.0;
        double previous_se = 0.0;
        auto const ref = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 8);
        for (double L : {2.0, 5.0, 10.0})
        {
            auto const w = length_weights(1.0, 3, BoundaryCondition::dirichlet, L, 8, mc, 16);
            std::printf("    Dirichlet q_bar(L=%g) = %.6g +- %.2g (free %.6g)\n", L, w.q_bar, w.q_bar_stderr, ref.q_bar);
            out.require(w.q_bar > previous - 3.0 * std::hypot(w.q_bar_stderr, previous_se), fmt("q_bar^Dir not increasing at L=%g", L));
            out.require(w.q_bar <= ref.q_bar + 3.0 * w.q_bar_stderr, fmt("q_bar^Dir above q_bar at L=%g", L));
            previous = w.q_bar;
            previous_se = w.q_bar_stderr;
        }
    }
    return out;
}

// 8. restricted variational problem
Outcome restricted_variational()
{
    Outcome out;
    TimeGrid const grid(1.0, 8);
    ChiOptions options;
    options.k_max = 2000;
    for (double rho : {0.03, 0.0586, 0.12})
    {
        auto const le = optimize_chi_restricted(1.0, rho, PairPotential::zero(), grid, 3, ChiMode::le, options);
        auto const j = minimize_J(1.0, rho, 3, 2000);
        out.require(std::abs(le.f_upper - j.f) < 1e-5, fmt("rho=%g: chi route %.10g vs J route %.10g", rho, le.f_upper, j.f));
        auto const eq = optimize_chi_restricted(1.0, rho, PairPotential::zero(), grid, 3, ChiMode::eq, options);
        out.require(eq.value >= le.value - 1e-12, fmt("rho=%g: eq below le", rho));
    }

    ChiOptions small;
    small.k_max = 16;
    auto const g = PairPotential::gaussian(1.0, 1.0);
    for (double rho : {0.01, 0.04})
    {
        auto const le = optimize_chi_restricted(1.0, rho, g, grid, 3, ChiMode::le, small);
        auto const eq = optimize_chi_restricted(1.0, rho, g, grid, 3, ChiMode::eq, small);
        out.require(eq.value >= le.value - 3.0 * std::hypot(le.value_stderr, eq.value_stderr),
                    fmt("rho=%g with interaction: eq below le", rho));
    }

    auto const e = energy_rate_poisson({0.1}, g, grid, 3, {200000, 801, 1, 1000000});
    double const analytic = 0.5 * 0.01 * alpha_v(g, 3);
    std::printf("    single-length pair term %.6g +- %.2g, analytic %.6g\n", e.pair.mean, e.pair.stderr_, analytic);
    out.require(std::abs(e.pair.mean - analytic) < 3.0 * e.pair.stderr_, "single-length pair term off by more than 3 sigma");
    out.require(e.self.mean == 0.0, "single-leg self energy nonzero");
    return out;
}

}  // namespace

int main()
{
    struct Criterion
    {
        char const* name;
        std::function<Outcome()> run;
        double budget_seconds;
    };
    std::vector<Criterion> const criteria{
        {"ideal-gas equivalence of J minimization and the closed form", ideal_equivalence, 5.0},
        {"exact combinatorial backbone at v = 0", combinatorial_backbone, 10.0},
        {"three-route partition function with a soft Gaussian", three_routes, 300.0},
        {"mark-length identity of the empirical field", mark_length_identity, 0.0},
        {"upper and lower Hamiltonian bounds", hamiltonian_bounds, 0.0},
        {"quotient bound, monotonicity and boundary sandwich", quotient_monotonicity_sandwich, 0.0},
        {"bridge law", bridge_law, 0.0},
        {"restricted variational problem", restricted_variational, 0.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        auto const start = std::chrono::steady_clock::now();
        Outcome out;
        try
        {
            out = criteria[i].run();
        }
        catch (std::exception const& e)
        {
            out.require(false, std::string("exception: ") + e.what());
        }
        double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].budget_seconds > 0.0 && seconds > criteria[i].budget_seconds)
        {
            out.require(false, fmt("runtime %.1f s exceeds %.0f s", seconds, criteria[i].budget_seconds));
        }
        std::printf("criterion %zu: %s  %s (%.1f s)\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].name, seconds);
        for (auto const& note : out.notes)
        {
            std::printf("    %s\n", note.c_str());
        }
        std::fflush(stdout);
        failures += out.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
