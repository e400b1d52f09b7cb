#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <doctest.h>

#include "bosegas/cycle_expansion.hpp"
#include "bosegas/poisson_field.hpp"
#include "oracles.hpp"
#include "stats.hpp"

using namespace bosegas;

namespace {

MarkedConfiguration two_constant_marks(int l1, int l2, int slices)
{
    MarkedConfiguration omega;
    omega.box = BoxSpec(3, 5.0, BoundaryCondition::empty);
    omega.particles.push_back(test::constant_mark({0.0, 0.0, 0.0}, l1, slices));
    omega.particles.push_back(test::constant_mark({0.3, 0.1, 0.0}, l2, slices));
    return omega;
}

}  // namespace

TEST_CASE("pair interaction examples with a constant potential")
{
    TimeGrid const grid(0.7, 8);
    double const c = 2.5;
    auto const p = PairPotential::compact_step(c, 1.0);

    auto const two = two_constant_marks(1, 1, grid.slices);
    CHECK(pair_interaction(two, 0, 1, p, grid) == doctest::Approx(c * grid.beta / 2.0).epsilon(1e-14));
    CHECK(pair_interaction(two, 0, 0, p, grid) == 0.0);
    CHECK(hamiltonian(two, p, grid) == doctest::Approx(c * grid.beta).epsilon(1e-14));

    MarkedConfiguration one;
    one.box = two.box;
    one.particles.push_back(test::constant_mark({}, 2, grid.slices));
    CHECK(pair_interaction(one, 0, 0, p, grid) == doctest::Approx(c * grid.beta).epsilon(1e-14));
    CHECK(hamiltonian(one, p, grid) == doctest::Approx(c * grid.beta).epsilon(1e-14));

    MarkedConfiguration empty;
    empty.box = two.box;
    CHECK(hamiltonian(empty, p, grid) == 0.0);
}

TEST_CASE("hard-core contact gives infinite energy and zero weight")
{
    TimeGrid const grid(1.0, 8);
    auto const hc = PairPotential::inverse_power(1.0, 12.0, 0.5);
    auto const omega = two_constant_marks(1, 2, grid.slices);
    double const H = hamiltonian(omega, hc, grid);
    CHECK(std::isinf(H));
    CHECK(std::exp(-H) == 0.0);
}

TEST_CASE("particles anchored outside the box do not enter H")
{
    TimeGrid const grid(1.0, 8);
    auto const p = PairPotential::compact_step(1.0, 2.0);
    MarkedConfiguration omega;
    omega.box = BoxSpec(3, 2.0, BoundaryCondition::empty);
    omega.particles.push_back(test::constant_mark({0.0, 0.0, 0.0}, 1, grid.slices));
    omega.particles.push_back(test::constant_mark({1.5, 0.0, 0.0}, 1, grid.slices));
    CHECK(hamiltonian(omega, p, grid) == 0.0);
}

TEST_CASE("mark length counts")
{
    MarkedConfiguration omega;
    omega.box = BoxSpec(3, 4.0, BoundaryCondition::empty);
    auto const region = Region::of(omega.box);
    omega.particles.push_back(test::constant_mark({0.5, 0.0, 0.0}, 3, 2));
    CHECK(total_mark_length(omega, region) == 3);

    MarkedConfiguration outside = omega;
    outside.particles[0] = test::constant_mark({3.0, 0.0, 0.0}, 3, 2);
    CHECK(total_mark_length(outside, region) == 0);

    MarkedConfiguration three;
    three.box = omega.box;
    three.particles.push_back(test::constant_mark({0.1, 0.0, 0.0}, 1, 2));
    three.particles.push_back(test::constant_mark({-1.0, 0.5, 0.0}, 2, 2));
    three.particles.push_back(test::constant_mark({1.9, -1.9, 1.9}, 4, 2));
    CHECK(total_mark_length(three, region) == 7);
    CHECK(particle_count(three, region) == 3);
}

TEST_CASE("T is symmetric and H grows when a particle is inserted")
{
    TimeGrid const grid(1.0, 8);
    auto const p = PairPotential::gaussian(1.0, 0.8);
    for (auto bc : {BoundaryCondition::empty, BoundaryCondition::periodic})
    {
        BoxSpec const box(3, 2.5, bc);
        auto const weights = bc == BoundaryCondition::periodic ? cycle_weights(box, grid.beta, 6)
                                                               : length_weights(grid.beta, 3, bc, box.length, 6);
        for (std::uint64_t trial = 0; trial < 100; ++trial)
        {
            RandomStream rng(13, {static_cast<std::uint64_t>(bc), trial});
            auto omega = sample_marked_poisson(box, weights, grid, rng);
            for (std::size_t x = 0; x < omega.particles.size(); ++x)
            {
                for (std::size_t y = 0; y < omega.particles.size(); ++y)
                {
                    CHECK(pair_interaction(omega, x, y, p, grid) == pair_interaction(omega, y, x, p, grid));
                }
            }
            double const before = hamiltonian(omega, p, grid);
            CHECK(before >= 0.0);
            int const k = 1 + static_cast<int>(rng() % 3);
            omega.particles.push_back(sample_bridge(box.uniform_point(rng), k, grid, box, rng));
            CHECK(hamiltonian(omega, p, grid) >= before);
        }
    }
}

TEST_CASE("marked Poisson sampler: counts, lengths and total mark length")
{
    BoxSpec const box(3, 10.0, BoundaryCondition::empty);
    TimeGrid const grid(1.0, 2);
    int const K = 10000;
    auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, K);
    double sum_kq = 0.0;
    for (int k = 1; k <= K; ++k)
    {
        sum_kq += k * w[k];
    }

    test::Moments count, mass;
    int const bins = 8;
    std::vector<double> hist(bins + 1, 0.0);
    double particles = 0.0;
    for (std::size_t i = 0; i < 10000; ++i)
    {
        RandomStream rng(17, {i});
        auto const omega = sample_marked_poisson(box, w, grid, rng);
        count.add(static_cast<double>(omega.particles.size()));
        mass.add(static_cast<double>(total_mark_length(omega, Region::of(box))));
        for (auto const& f : omega.particles)
        {
            CHECK(box.contains(f.anchor));
            hist[static_cast<std::size_t>(std::min(f.length, bins + 1) - 1)] += 1.0;
            particles += 1.0;
        }
    }
    CHECK(std::abs(count.mean() - 1000.0 * w.q_bar) < 4.0 * count.stderr_());
    CHECK(std::abs(count.mean() - 30.1115) < 4.0 * count.stderr_());
    CHECK(std::abs(mass.mean() - 1000.0 * sum_kq) < 4.0 * mass.stderr_());

    double chi2 = 0.0;
    double tail = 1.0;
    for (int b = 0; b <= bins; ++b)
    {
        double p = 0.0;
        if (b < bins)
        {
            p = w[b + 1] / w.q_bar;
            tail -= p;
        }
        else
        {
            p = tail;
        }
        double const expected = particles * p;
        chi2 += (hist[static_cast<std::size_t>(b)] - expected) * (hist[static_cast<std::size_t>(b)] - expected) / expected;
    }
    double const dof = bins;
    CHECK(chi2 < dof + 4.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("length-constraint DP against enumeration and the exponential-series recurrence")
{
    for (double volume : {1.0, 10.0, 100.0})
    {
        auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 20);
        std::vector<double> c(20);
        for (int k = 1; k <= 20; ++k)
        {
            c[static_cast<std::size_t>(k - 1)] = volume * w[k];
        }
        auto const series = test::exp_series(c, 20);

        LengthConstraintDP const zero(volume, w, 0);
        CHECK(zero.probability() == doctest::Approx(std::exp(-volume * w.q_bar)).epsilon(1e-14));

        for (int n = 1; n <= 20; ++n)
        {
            LengthConstraintDP const dp(volume, w, n);
            double enumerated = 0.0;
            for (auto const& occ : test::partitions_recursive(n))
            {
                enumerated += test::occupation_weight(occ, c);
            }
            CAPTURE(volume);
            CAPTURE(n);
            CHECK(dp.weight_sum() == doctest::Approx(enumerated).epsilon(1e-12));
            CHECK(dp.weight_sum() == doctest::Approx(series[static_cast<std::size_t>(n)]).epsilon(1e-12));
            CHECK(dp.probability() == doctest::Approx(enumerated * std::exp(-volume * w.q_bar)).epsilon(1e-12));
        }
    }
}

TEST_CASE("conditional partition sampler matches the enumerated law")
{
    int const n = 6;
    double const volume = 10.0;
    auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, n);
    std::vector<double> c(n);
    for (int k = 1; k <= n; ++k)
    {
        c[static_cast<std::size_t>(k - 1)] = volume * w[k];
    }
    auto const parts = test::partitions_recursive(n);
    std::map<std::vector<int>, double> expected;
    double total = 0.0;
    for (auto const& occ : parts)
    {
        expected[occ] = test::occupation_weight(occ, c);
        total += expected[occ];
    }

    LengthConstraintDP const dp(volume, w, n);
    std::map<std::vector<int>, double> seen;
    std::size_t const draws = 200000;
    RandomStream rng(19, {1});
    for (std::size_t i = 0; i < draws; ++i)
    {
        auto const occ = dp.sample(rng);
        int mass = 0;
        for (int k = 1; k <= n; ++k)
        {
            mass += k * occ[static_cast<std::size_t>(k - 1)];
        }
        REQUIRE(mass == n);
        seen[occ] += 1.0;
    }
    double chi2 = 0.0;
    for (auto const& [occ, weight] : expected)
    {
        double const e = draws * weight / total;
        double const o = seen.count(occ) ? seen[occ] : 0.0;
        chi2 += (o - e) * (o - e) / e;
    }
    double const dof = static_cast<double>(parts.size() - 1);
    CHECK(chi2 < dof + 4.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("Z_N at v = 0 for a box of volume 10")
{
    auto const box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::empty);
    TimeGrid const grid(1.0, 16);
    auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 20);
    double const q1 = std::pow(4.0 * std::numbers::pi, -1.5);
    double const q2 = q1 * std::pow(2.0, -2.5);

    auto const z1 = estimate_Z_poisson(1, box, PairPotential::zero(), grid, w, {});
    CHECK(z1.exact);
    CHECK(z1.stderr_ == 0.0);
    CHECK(z1.mean == doctest::Approx(10.0 * q1).epsilon(1e-13));
    CHECK(z1.mean == doctest::Approx(0.224464).epsilon(2e-4));

    auto const z2 = estimate_Z_poisson(2, box, PairPotential::zero(), grid, w, {});
    CHECK(z2.mean == doctest::Approx(50.0 * q1 * q1 + 10.0 * q2).epsilon(1e-13));
    CHECK(z2.mean == doctest::Approx(0.064872).epsilon(2e-4));

    std::vector<double> c(20);
    for (int k = 1; k <= 20; ++k)
    {
        c[static_cast<std::size_t>(k - 1)] = 10.0 * w[k];
    }
    auto const series = test::exp_series(c, 20);
    for (int n = 1; n <= 20; ++n)
    {
        auto const z = estimate_Z_poisson(n, box, PairPotential::zero(), grid, w, {});
        CHECK(z.exact);
        CHECK(z.mean == doctest::Approx(series[static_cast<std::size_t>(n)]).epsilon(1e-12));
        CHECK(z.mean == doctest::Approx(Z_cycle(n, box, PairPotential::zero(), grid, {}).mean).epsilon(1e-12));
    }
}

TEST_CASE("estimate_Z_poisson with interaction is below the free value and is reproducible")
{
    auto const box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::empty);
    TimeGrid const grid(1.0, 8);
    auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 3);
    auto const p = PairPotential::gaussian(1.0, 1.0);
    McParams const mc{4000, 5, 1, 1000000};
    auto const a = estimate_Z_poisson(3, box, p, grid, w, mc);
    McParams mc8 = mc;
    mc8.threads = 8;
    auto const b = estimate_Z_poisson(3, box, p, grid, w, mc8);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.mean < estimate_Z_poisson(3, box, PairPotential::zero(), grid, w, mc).mean);
    CHECK(a.mean > 0.0);
    CHECK_THROWS(estimate_Z_poisson(0, box, p, grid, w, mc));
}

TEST_CASE("boundary-condition sandwich")
{
    auto const box_of = [](BoundaryCondition bc) { return BoxSpec::with_volume(3, 10.0, bc); };
    TimeGrid const grid(1.0, 8);
    auto const p = PairPotential::gaussian(1.0, 1.0);
    McParams const mc{20000, 29, 1, 1000000};
    for (int n = 1; n <= 2; ++n)
    {
        auto const dir_box = box_of(BoundaryCondition::dirichlet);
        auto const emp_box = box_of(BoundaryCondition::empty);
        auto const per_box = box_of(BoundaryCondition::periodic);
        auto const free = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, n);
        auto const zd = estimate_Z_poisson(n, dir_box, p, grid, free, mc);
        auto const ze = estimate_Z_poisson(n, emp_box, p, grid, free, mc);
        auto const zp = estimate_Z_poisson(n, per_box, p, grid, cycle_weights(per_box, 1.0, n), mc);
        CAPTURE(n);
        CHECK(zd.mean <= ze.mean + 3.0 * std::hypot(zd.stderr_, ze.stderr_));
        CHECK(ze.mean <= zp.mean + 3.0 * std::hypot(ze.stderr_, zp.stderr_));
    }
}
