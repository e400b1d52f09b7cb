#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>
#include <doctest.h>

#include "bosegas/bridges.hpp"
#include "stats.hpp"

using namespace bosegas;

namespace {

double kernel_1d(double x, double y, double t)
{
    return std::exp(-(x - y) * (x - y) / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

// int g_s(x, y) g_t(y, z) dy for one axis by a wide trapezoid rule.
double convolve_1d(double x, double z, double s, double t)
{
    double const width = 14.0 * std::sqrt(2.0 * std::max(s, t));
    double const lo = std::min(x, z) - width;
    double const hi = std::max(x, z) + width;
    int const n = 40000;
    double const h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i)
    {
        double const y = lo + i * h;
        double const w = (i == 0 || i == n) ? 0.5 : 1.0;
        sum += w * kernel_1d(x, y, s) * kernel_1d(y, z, t);
    }
    return sum * h;
}

}  // namespace

TEST_CASE("free kernel value, symmetry and periodic domination")
{
    double const q1 = std::pow(4.0 * std::numbers::pi, -1.5);
    CHECK(free_kernel({}, {}, 1.0, 3) == doctest::Approx(q1).epsilon(1e-15));
    CHECK(free_kernel({}, {}, 1.0, 3) == doctest::Approx(2.24464e-2).epsilon(1e-3));
    CHECK_THROWS(free_kernel({}, {}, 0.0, 3));

    BoxSpec const torus(3, 2.0, BoundaryCondition::periodic);
    RandomStream rng(3, {2});
    for (int i = 0; i < 200; ++i)
    {
        Point const x = torus.uniform_point(rng);
        Point const y = torus.uniform_point(rng);
        double const t = rng.uniform(0.05, 3.0);
        double const g = free_kernel(x, y, t, 3);
        CHECK(g > 0.0);
        CHECK(g == free_kernel(y, x, t, 3));
        CHECK(periodic_kernel(x, y, t, torus) >= g);
        CHECK(periodic_kernel(x, y, t, torus) == doctest::Approx(periodic_kernel(y, x, t, torus)).epsilon(1e-14));
    }
}

TEST_CASE("semigroup property against numerical Gaussian convolution")
{
    RandomStream rng(5, {1});
    for (int trial = 0; trial < 100; ++trial)
    {
        Point x{}, z{};
        for (int a = 0; a < 3; ++a)
        {
            x[a] = rng.uniform(-2.0, 2.0);
            z[a] = rng.uniform(-2.0, 2.0);
        }
        double const s = rng.uniform(0.1, 2.0);
        double const t = rng.uniform(0.1, 2.0);
        double convolved = 1.0;
        for (int a = 0; a < 3; ++a)
        {
            convolved *= convolve_1d(x[a], z[a], s, t);
        }
        CHECK(convolved == doctest::Approx(free_kernel(x, z, s + t, 3)).epsilon(1e-12));
    }
}

TEST_CASE("theta sum against direct summation")
{
    for (double a : {0.01, 0.3, 1.0, 6.25, 40.0})
    {
        double direct = 0.0;
        for (int n = -4000; n <= 4000; ++n)
        {
            direct += std::exp(-a * n * n);
        }
        CHECK(theta_sum(a) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("length weights, empty boundary")
{
    double const thermal = std::pow(4.0 * std::numbers::pi, -1.5);
    auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 1000000);
    CHECK(w[1] == doctest::Approx(thermal).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(thermal * std::pow(2.0, -2.5)).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(3.96797e-3).epsilon(2e-4));

    double const zeta = boost::math::zeta(2.5);
    // Omitted tail of sum k^-2.5 beyond K = 1e6 is below (2/3) K^-1.5 = 6.7e-10.
    CHECK(w.q_bar == doctest::Approx(zeta * thermal).epsilon(1e-9));
    CHECK(w.q_bar == doctest::Approx(3.01115e-2).epsilon(1e-5));
    CHECK(w.q_bar <= zeta * thermal);

    double partial = 0.0;
    for (int k = 1; k <= 2000; ++k)
    {
        if (k > 1)
        {
            CHECK(w[k] < w[k - 1]);
        }
        partial += w[k];
        CHECK(partial <= zeta * thermal);
    }
}

TEST_CASE("length weights, periodic image corrections")
{
    auto const free = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 20);
    auto const per = length_weights(1.0, 3, BoundaryCondition::periodic, 10.0, 20);
    CHECK(per[1] - free[1] >= 0.0);
    CHECK(per[1] - free[1] <= 1e-10 * free[1]);
    for (int k = 1; k <= 20; ++k)
    {
        double const theta = theta_sum(100.0 / (4.0 * k));
        CHECK(per[k] == doctest::Approx(free[k] * theta * theta * theta).epsilon(1e-14));
        CHECK(per[k] >= free[k]);
    }

    auto const small = length_weights(1.0, 3, BoundaryCondition::periodic, 2.0, 4);
    CHECK(small[1] > 1.001 * free[1]);
}

TEST_CASE("torus distance examples")
{
    BoxSpec const line(1, 10.0, BoundaryCondition::periodic);
    CHECK(torus_distance({4.9, 0, 0}, {-4.9, 0, 0}, line) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(torus_distance({1.3, 0, 0}, {1.3, 0, 0}, line) == 0.0);
    BoxSpec const plane(2, 2.0, BoundaryCondition::periodic);
    CHECK(torus_distance({0.9, 0, 0}, {-0.9, 0, 0}, plane) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(box_distance({0.9, 0, 0}, {-0.9, 0, 0}, plane) == doctest::Approx(0.2).epsilon(1e-12));
    BoxSpec const open(2, 2.0, BoundaryCondition::empty);
    CHECK(box_distance({0.9, 0, 0}, {-0.9, 0, 0}, open) == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("bridge endpoints are pinned")
{
    TimeGrid const grid(1.0, 8);
    RandomStream rng(9, {4});
    for (auto bc : {BoundaryCondition::empty, BoundaryCondition::periodic, BoundaryCondition::dirichlet})
    {
        BoxSpec const box(3, 2.5, bc);
        for (int k = 1; k <= 4; ++k)
        {
            Point const x = box.uniform_point(rng);
            auto const f = sample_bridge(x, k, grid, box, rng);
            CHECK(f.length == k);
            REQUIRE(f.positions.size() == static_cast<std::size_t>(k * grid.slices + 1));
            CHECK(f.positions.front() == x);
            if (bc == BoundaryCondition::periodic)
            {
                CHECK(torus_distance(f.positions.back(), x, box) < 1e-12);
            }
            else
            {
                CHECK(f.positions.back() == x);
            }
            if (bc == BoundaryCondition::dirichlet)
            {
                CHECK(stays_in_box(f, box));
            }
        }
    }
}

TEST_CASE("midpoint variance of a unit bridge")
{
    TimeGrid const grid(1.0, 16);
    BoxSpec const box(3, 1.0, BoundaryCondition::empty);
    test::Moments m[3];
    for (std::size_t i = 0; i < 100000; ++i)
    {
        RandomStream rng(21, {i});
        auto const f = sample_bridge({}, 1, grid, box, rng);
        for (int a = 0; a < 3; ++a)
        {
            double const c = f.positions[8][a];
            m[a].add(c * c);
        }
    }
    for (auto const& axis : m)
    {
        CHECK(std::abs(axis.mean() - 0.5) < 4.0 * axis.stderr_());
    }
}

TEST_CASE("pinned increments have the bridge covariance")
{
    // Increments over [0,4], [4,8], [8,16] steps of a two-leg bridge (T = 2).
    TimeGrid const grid(1.0, 8);
    BoxSpec const box(1, 1.0, BoundaryCondition::empty);
    double const T = 2.0;
    int const cut[4] = {0, 4, 8, 16};
    double len[3];
    for (int a = 0; a < 3; ++a)
    {
        len[a] = (cut[a + 1] - cut[a]) * grid.step();
    }
    test::Moments cov[3][3];
    for (std::size_t i = 0; i < 100000; ++i)
    {
        RandomStream rng(23, {i});
        auto const f = sample_bridge({}, 2, grid, box, rng);
        double inc[3];
        for (int a = 0; a < 3; ++a)
        {
            inc[a] = f.positions[cut[a + 1]][0] - f.positions[cut[a]][0];
        }
        for (int a = 0; a < 3; ++a)
        {
            for (int b = a; b < 3; ++b)
            {
                cov[a][b].add(inc[a] * inc[b]);
            }
        }
    }
    for (int a = 0; a < 3; ++a)
    {
        for (int b = a; b < 3; ++b)
        {
            double const exact = a == b ? 2.0 * len[a] * (1.0 - len[a] / T) : -2.0 * len[a] * len[b] / T;
            CAPTURE(a);
            CAPTURE(b);
            CHECK(std::abs(cov[a][b].mean() - exact) < 4.0 * cov[a][b].stderr_());
        }
    }
}

TEST_CASE("concatenation: two-leg bridge equals two one-leg bridges through a Gaussian midpoint")
{
    TimeGrid const grid(1.0, 4);
    BoxSpec const box(1, 1.0, BoundaryCondition::empty);
    int const probes[4] = {2, 3, 4, 6};
    test::Moments direct_mean[4], glued_mean[4];
    test::Moments direct_cov[4][4], glued_cov[4][4];
    std::vector<Point> second;
    for (std::size_t i = 0; i < 100000; ++i)
    {
        RandomStream r1(31, {i});
        auto const f = sample_bridge({}, 2, grid, box, r1);

        // Midpoint density g(x,y) g(y,x) / g_2(x,x) is Gaussian with variance beta per axis.
        RandomStream r2(37, {i});
        Point const y{std::sqrt(grid.beta) * r2.normal(), 0.0, 0.0};
        auto const first = sample_open_bridge({}, y, grid, box, r2);
        auto const back = sample_open_bridge(y, {}, grid, box, r2);
        std::vector<double> glued;
        for (auto const& p : first.positions)
        {
            glued.push_back(p[0]);
        }
        for (std::size_t j = 1; j < back.positions.size(); ++j)
        {
            glued.push_back(back.positions[j][0]);
        }

        for (int a = 0; a < 4; ++a)
        {
            double const da = f.positions[probes[a]][0];
            double const ga = glued[probes[a]];
            direct_mean[a].add(da);
            glued_mean[a].add(ga);
            for (int b = a; b < 4; ++b)
            {
                direct_cov[a][b].add(da * f.positions[probes[b]][0]);
                glued_cov[a][b].add(ga * glued[probes[b]]);
            }
        }
    }
    for (int a = 0; a < 4; ++a)
    {
        CHECK(test::z_score(direct_mean[a], glued_mean[a]) < 4.0);
        for (int b = a; b < 4; ++b)
        {
            CHECK(test::z_score(direct_cov[a][b], glued_cov[a][b]) < 4.0);
        }
    }
}

TEST_CASE("periodic winding law")
{
    // L = 1, k beta = 1: P(z) proportional to exp(-z^2 / 4) per axis.
    TimeGrid const grid(1.0, 4);
    BoxSpec const box(1, 1.0, BoundaryCondition::periodic);
    double const theta = theta_sum(0.25);
    std::size_t const n = 40000;
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i)
    {
        RandomStream rng(41, {i});
        auto const f = sample_bridge({0.1, 0, 0}, 1, grid, box, rng);
        int const z = std::abs(f.winding[0]);
        if (z < 3)
        {
            ++counts[z];
        }
    }
    for (int z = 0; z < 3; ++z)
    {
        double const p = (z == 0 ? 1.0 : 2.0) * std::exp(-0.25 * z * z) / theta;
        double const se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(counts[z] / double(n) - p) < 4.0 * se);
    }
}

TEST_CASE("Dirichlet weights: acceptance oracle and monotone convergence in L")
{
    TimeGrid const grid(1.0, 16);
    McParams const mc{20000, 3, 1, 1000000};
    auto const free = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 4);

    // Independent acceptance count from free bridges with uniform anchors.
    BoxSpec const box(3, 3.0, BoundaryCondition::dirichlet);
    BoxSpec const open(3, 3.0, BoundaryCondition::empty);
    auto const dir = length_weights(1.0, 3, BoundaryCondition::dirichlet, 3.0, 4, mc, grid.slices);
    for (int k = 1; k <= 4; ++k)
    {
        std::size_t accepted = 0;
        std::size_t const n = 20000;
        for (std::size_t i = 0; i < n; ++i)
        {
            RandomStream rng(77, {static_cast<std::uint64_t>(k), i});
            auto const f = sample_bridge(open.uniform_point(rng), k, grid, open, rng);
            accepted += stays_in_box(f, box) ? 1 : 0;
        }
        double const p = accepted / double(n);
        double const oracle = p * free[k];
        double const oracle_se = std::sqrt(p * (1.0 - p) / n) * free[k];
        CAPTURE(k);
        CHECK(std::abs(dir[k] - oracle) <= 4.0 * std::hypot(oracle_se, dir.q_stderr[k - 1]));
    }

    double previous = 0.0;
    double previous_se = 0.0;
    for (double L : {2.0, 5.0, 10.0})
    {
        auto const w = length_weights(1.0, 3, BoundaryCondition::dirichlet, L, 8, mc, grid.slices);
        CAPTURE(L);
        CHECK(w.q_bar + 3.0 * w.q_bar_stderr > previous - 3.0 * previous_se);
        CHECK(w.q_bar > previous);
        auto const ref = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 8);
        CHECK(w.q_bar <= ref.q_bar + 3.0 * w.q_bar_stderr);
        previous = w.q_bar;
        previous_se = w.q_bar_stderr;
    }
}

TEST_CASE("Dirichlet rejection gives up with an acceptance estimate")
{
    TimeGrid const grid(1.0, 16);
    BoxSpec const tiny(3, 0.05, BoundaryCondition::dirichlet);
    RandomStream rng(1, {1});
    try
    {
        sample_bridge({}, 3, grid, tiny, rng, 200);
        FAIL("expected SamplingFailure");
    }
    catch (SamplingFailure const& e)
    {
        CHECK(e.acceptance_estimate() >= 0.0);
        CHECK(e.acceptance_estimate() < 0.05);
    }
}
