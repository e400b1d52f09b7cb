#include "bosegas/poisson_field.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bosegas/parallel.hpp"

namespace bosegas {

namespace {

constexpr std::uint64_t kPoissonTag = 0x706f6973ULL;

Point shifted(Point p, Point const& shift)
{
    p[0] += shift[0];
    p[1] += shift[1];
    p[2] += shift[2];
    return p;
}

/// Free-space weights matching `weights` in beta, d and K_max.
LengthWeights reference_weights(LengthWeights const& weights)
{
    return length_weights(weights.beta, weights.d, BoundaryCondition::empty, 0.0, weights.k_max());
}

}  // namespace

Region Region::centered(int d, double side)
{
    Region r;
    r.d = d;
    for (int i = 0; i < d; ++i)
    {
        r.lower[i] = -0.5 * side;
        r.upper[i] = 0.5 * side;
    }
    return r;
}

bool Region::contains(Point const& x) const
{
    for (int i = 0; i < d; ++i)
    {
        if (x[i] < lower[i] || x[i] > upper[i])
        {
            return false;
        }
    }
    return true;
}

InteractionKernel::InteractionKernel(PairPotential const& potential, TimeGrid const& grid, BoxSpec const& box)
    : potential_(potential), grid_(grid), box_(box)
{
}

double InteractionKernel::distance(Point const& x, Point const& y) const
{
    return box_distance(x, y, box_);
}

double InteractionKernel::leg_pair(Bridge const& a, int i, Bridge const& b, int j, Point const& shift) const
{
    int const n = grid_.slices;
    auto value = [&](int m) {
        return potential_(distance(a.at(i, m, n), shifted(b.at(j, m, n), shift)));
    };
    double sum = 0.5 * (value(0) + value(n));
    for (int m = 1; m < n; ++m)
    {
        sum += value(m);
    }
    return sum * grid_.step();
}

double InteractionKernel::between(Bridge const& a, Bridge const& b, Point const& shift) const
{
    double sum = 0.0;
    for (int i = 0; i < a.length; ++i)
    {
        for (int j = 0; j < b.length; ++j)
        {
            sum += leg_pair(a, i, b, j, shift);
            if (std::isinf(sum))
            {
                return sum;
            }
        }
    }
    return sum;
}

double InteractionKernel::self(Bridge const& a) const
{
    double sum = 0.0;
    for (int i = 0; i < a.length; ++i)
    {
        for (int j = i + 1; j < a.length; ++j)
        {
            sum += 2.0 * leg_pair(a, i, a, j);
            if (std::isinf(sum))
            {
                return sum;
            }
        }
    }
    return sum;
}

double pair_interaction(MarkedConfiguration const& omega,
                        std::size_t x_idx,
                        std::size_t y_idx,
                        PairPotential const& p,
                        TimeGrid const& grid)
{
    if (x_idx >= omega.particles.size() || y_idx >= omega.particles.size())
    {
        throw std::out_of_range("pair_interaction: particle index out of range");
    }
    InteractionKernel const kernel(p, grid, omega.box);
    if (x_idx == y_idx)
    {
        return 0.5 * kernel.self(omega.particles[x_idx]);
    }
    // fixed argument order keeps T_{x,y} == T_{y,x} bit for bit
    auto const lo = std::min(x_idx, y_idx);
    auto const hi = std::max(x_idx, y_idx);
    return 0.5 * kernel.between(omega.particles[lo], omega.particles[hi]);
}

double hamiltonian(std::span<Bridge const> marks, InteractionKernel const& kernel)
{
    if (kernel.potential().is_zero())
    {
        return 0.0;
    }
    double h = 0.0;
    for (std::size_t x = 0; x < marks.size(); ++x)
    {
        h += 0.5 * kernel.self(marks[x]);
        for (std::size_t y = x + 1; y < marks.size(); ++y)
        {
            // T_{x,y} + T_{y,x}
            h += kernel.between(marks[x], marks[y]);
        }
        if (std::isinf(h))
        {
            return h;
        }
    }
    return h;
}

double hamiltonian(MarkedConfiguration const& omega, PairPotential const& p, TimeGrid const& grid)
{
    InteractionKernel const kernel(p, grid, omega.box);
    std::vector<Bridge> inside;
    inside.reserve(omega.particles.size());
    for (auto const& f : omega.particles)
    {
        if (omega.box.contains(f.anchor))
        {
            inside.push_back(f);
        }
    }
    return hamiltonian(std::span<Bridge const>(inside), kernel);
}

long total_mark_length(MarkedConfiguration const& omega, Region const& region)
{
    long total = 0;
    for (auto const& f : omega.particles)
    {
        if (region.contains(f.anchor))
        {
            total += f.length;
        }
    }
    return total;
}

long particle_count(MarkedConfiguration const& omega, Region const& region)
{
    long count = 0;
    for (auto const& f : omega.particles)
    {
        if (region.contains(f.anchor))
        {
            ++count;
        }
    }
    return count;
}

MarkedConfiguration sample_marked_poisson(BoxSpec const& box,
                                          LengthWeights const& weights,
                                          TimeGrid const& grid,
                                          RandomStream& rng,
                                          std::size_t max_attempts)
{
    MarkedConfiguration omega;
    omega.box = box;
    omega.seed = rng.key();
    std::poisson_distribution<long> count_dist(weights.q_bar * box.volume());
    std::discrete_distribution<int> length_dist(weights.q.begin(), weights.q.end());
    long const count = count_dist(rng);
    omega.particles.reserve(static_cast<std::size_t>(count));
    for (long c = 0; c < count; ++c)
    {
        int const k = length_dist(rng) + 1;
        if (box.bc == BoundaryCondition::dirichlet)
        {
            Bridge f;
            f.length = k;
            std::size_t attempts = 0;
            for (;;)
            {
                f.anchor = box.uniform_point(rng);
                sample_free_bridge_path(f.anchor, f.anchor, box.d, k * grid.slices, grid.step(), rng, f.positions);
                if (stays_in_box(f, box))
                {
                    break;
                }
                if (++attempts >= max_attempts)
                {
                    throw SamplingFailure("dirichlet mark rejection exhausted its attempt budget",
                                          1.0 / static_cast<double>(attempts));
                }
            }
            omega.particles.push_back(std::move(f));
        }
        else
        {
            omega.particles.push_back(sample_bridge(box.uniform_point(rng), k, grid, box, rng));
        }
    }
    return omega;
}

LengthConstraintDP::LengthConstraintDP(double volume, LengthWeights const& weights, int total)
    : volume_(volume), q_bar_(weights.q_bar), total_(total)
{
    if (total < 0)
    {
        throw std::invalid_argument("length constraint: N must be >= 0");
    }
    // lengths above N cannot contribute to a total of N
    stages_ = std::min(weights.k_max(), total);
    intensity_.resize(static_cast<std::size_t>(stages_));
    for (int k = 1; k <= stages_; ++k)
    {
        intensity_[static_cast<std::size_t>(k - 1)] = volume * weights[k];
    }
    auto const width = static_cast<std::size_t>(total) + 1;
    table_.assign(static_cast<std::size_t>(stages_) + 1, std::vector<double>(width, 0.0));
    table_[0][0] = 1.0;
    for (int k = 1; k <= stages_; ++k)
    {
        double const a = intensity_[static_cast<std::size_t>(k - 1)];
        auto const& prev = table_[static_cast<std::size_t>(k - 1)];
        auto& cur = table_[static_cast<std::size_t>(k)];
        for (int n = 0; n <= total; ++n)
        {
            double term = 1.0;  // a^m / m!
            double sum = 0.0;
            for (int m = 0; k * m <= n; ++m)
            {
                if (m > 0)
                {
                    term *= a / m;
                }
                sum += prev[static_cast<std::size_t>(n - k * m)] * term;
            }
            cur[static_cast<std::size_t>(n)] = sum;
        }
    }
}

double LengthConstraintDP::probability() const
{
    return std::exp(-volume_ * q_bar_) * weight_sum();
}

std::vector<int> LengthConstraintDP::sample(RandomStream& rng) const
{
    std::vector<int> lambda(static_cast<std::size_t>(total_), 0);
    int remaining = total_;
    for (int k = stages_; k >= 1 && remaining > 0; --k)
    {
        double const a = intensity_[static_cast<std::size_t>(k - 1)];
        auto const& prev = table_[static_cast<std::size_t>(k - 1)];
        double const norm = table_[static_cast<std::size_t>(k)][static_cast<std::size_t>(remaining)];
        double u = rng.uniform() * norm;
        double term = 1.0;
        int chosen = 0;
        for (int m = 0; k * m <= remaining; ++m)
        {
            if (m > 0)
            {
                term *= a / m;
            }
            double const w = prev[static_cast<std::size_t>(remaining - k * m)] * term;
            chosen = m;
            if (u < w)
            {
                break;
            }
            u -= w;
        }
        // guard against round-off picking an infeasible last option
        while (chosen > 0 && prev[static_cast<std::size_t>(remaining - k * chosen)] == 0.0)
        {
            --chosen;
        }
        lambda[static_cast<std::size_t>(k - 1)] = chosen;
        remaining -= k * chosen;
    }
    if (remaining != 0)
    {
        throw std::logic_error("length constraint sampler did not reach the target total");
    }
    return lambda;
}

EstimatorResult estimate_Z_poisson(int n,
                                   BoxSpec const& box,
                                   PairPotential const& p,
                                   TimeGrid const& grid,
                                   LengthWeights const& weights,
                                   McParams const& mc)
{
    if (n < 1)
    {
        throw std::invalid_argument("estimate_Z_poisson: N must be >= 1");
    }
    if (weights.k_max() < n)
    {
        throw std::invalid_argument("estimate_Z_poisson: weights must cover lengths up to N");
    }
    bool const dirichlet = box.bc == BoundaryCondition::dirichlet;
    LengthWeights const dp_weights = dirichlet ? reference_weights(weights) : weights;
    LengthConstraintDP const dp(box.volume(), dp_weights, n);
    double const prefactor = dp.weight_sum();

    if (p.is_zero() && !dirichlet)
    {
        return EstimatorResult::exact_value(prefactor);
    }

    InteractionKernel const kernel(p, grid, box);
    BoxSpec const sampling_box = dirichlet ? BoxSpec(box.d, box.length, BoundaryCondition::empty) : box;
    std::vector<double> values(mc.samples);
    parallel_for(mc.samples, mc.threads, [&](std::size_t i) {
        RandomStream rng(mc.seed, {kPoissonTag, i});
        auto const lambda = dp.sample(rng);
        std::vector<Bridge> marks;
        for (int k = 1; k <= n; ++k)
        {
            for (int c = 0; c < lambda[static_cast<std::size_t>(k - 1)]; ++c)
            {
                marks.push_back(sample_bridge(sampling_box.uniform_point(rng), k, grid, sampling_box, rng));
            }
        }
        if (dirichlet)
        {
            for (auto const& f : marks)
            {
                if (!stays_in_box(f, box))
                {
                    values[i] = 0.0;
                    return;
                }
            }
        }
        values[i] = prefactor * std::exp(-hamiltonian(std::span<Bridge const>(marks), kernel));
    });
    return summarize(values, mc.seed);
}

}  // namespace bosegas
