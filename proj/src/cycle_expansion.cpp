#include "bosegas/cycle_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bosegas/parallel.hpp"
#include "bosegas/poisson_field.hpp"

namespace bosegas {

namespace {

constexpr std::uint64_t kCycleTag = 0x6379636cULL;
constexpr std::uint64_t kPermTag = 0x7065726dULL;
constexpr std::size_t kMinSamplesPerTerm = 64;

}  // namespace

int IntegerPartition::cycles() const
{
    return std::accumulate(occupation.begin(), occupation.end(), 0);
}

bool IntegerPartition::valid() const
{
    long total = 0;
    for (int k = 1; k <= static_cast<int>(occupation.size()); ++k)
    {
        if ((*this)[k] < 0)
        {
            return false;
        }
        total += static_cast<long>(k) * (*this)[k];
    }
    return total == n;
}

PartitionEnumerator::PartitionEnumerator(int n)
{
    if (n < 1)
    {
        throw std::invalid_argument("integer partitions: N must be >= 1");
    }
    current_.n = n;
    current_.occupation.assign(static_cast<std::size_t>(n), 0);
    current_.occupation[0] = n;
}

bool PartitionEnumerator::next()
{
    auto& lam = current_.occupation;
    int const n = current_.n;
    // budget available to lengths <= k, i.e. n minus the mass of lengths > k
    std::vector<int> budget(static_cast<std::size_t>(n) + 2, 0);
    int above = 0;
    for (int k = n; k >= 1; --k)
    {
        budget[static_cast<std::size_t>(k)] = n - above;
        above += k * lam[static_cast<std::size_t>(k - 1)];
    }
    for (int k = 2; k <= n; ++k)
    {
        auto const idx = static_cast<std::size_t>(k - 1);
        if (k * (lam[idx] + 1) <= budget[static_cast<std::size_t>(k)])
        {
            ++lam[idx];
            int used = 0;
            for (int j = k; j <= n; ++j)
            {
                used += j * lam[static_cast<std::size_t>(j - 1)];
            }
            for (int j = 2; j < k; ++j)
            {
                lam[static_cast<std::size_t>(j - 1)] = 0;
            }
            lam[0] = n - used;
            return true;
        }
    }
    return false;
}

std::vector<IntegerPartition> integer_partitions(int n)
{
    if (n > kMaxCycleN)
    {
        throw std::invalid_argument("integer_partitions: N too large to store (use PartitionEnumerator)");
    }
    std::vector<IntegerPartition> result;
    PartitionEnumerator e(n);
    do
    {
        result.push_back(e.current());
    } while (e.next());
    return result;
}

std::uint64_t count_partitions(int n)
{
    std::uint64_t count = 0;
    PartitionEnumerator e(n);
    do
    {
        ++count;
    } while (e.next());
    return count;
}

std::uint64_t class_size(IntegerPartition const& lambda)
{
    int const n = lambda.n;
    if (n > 20)
    {
        throw std::overflow_error("class_size: exact value exceeds 64 bits for N > 20");
    }
    // prime exponents of N! / prod(lambda_k! k^lambda_k)
    std::vector<int> exponent(static_cast<std::size_t>(n) + 1, 0);
    auto add_factor = [&exponent](int value, int sign) {
        for (int p = 2; value > 1; ++p)
        {
            while (value % p == 0)
            {
                exponent[static_cast<std::size_t>(p)] += sign;
                value /= p;
            }
        }
    };
    for (int i = 2; i <= n; ++i)
    {
        add_factor(i, +1);
    }
    for (int k = 1; k <= n; ++k)
    {
        int const m = lambda[k];
        for (int i = 2; i <= m; ++i)
        {
            add_factor(i, -1);
        }
        for (int i = 0; i < m; ++i)
        {
            add_factor(k, -1);
        }
    }
    std::uint64_t result = 1;
    for (int p = 2; p <= n; ++p)
    {
        int const e = exponent[static_cast<std::size_t>(p)];
        if (e < 0)
        {
            throw std::logic_error("class_size: invalid partition");
        }
        for (int i = 0; i < e; ++i)
        {
            result *= static_cast<std::uint64_t>(p);
        }
    }
    return result;
}

double class_fraction(IntegerPartition const& lambda)
{
    double log_denominator = 0.0;
    for (int k = 1; k <= lambda.n; ++k)
    {
        int const m = lambda[k];
        log_denominator += std::lgamma(m + 1.0) + m * std::log(static_cast<double>(k));
    }
    return std::exp(-log_denominator);
}

double partition_weight(IntegerPartition const& lambda, double volume, LengthWeights const& weights)
{
    double w = 1.0;
    for (int k = 1; k <= lambda.n; ++k)
    {
        int const m = lambda[k];
        if (m == 0)
        {
            continue;
        }
        double const a = volume * weights[k];
        for (int i = 1; i <= m; ++i)
        {
            w *= a / i;
        }
    }
    return w;
}

LengthWeights cycle_weights(BoxSpec const& box, double beta, int k_max)
{
    if (box.bc == BoundaryCondition::periodic)
    {
        return length_weights(beta, box.d, box.bc, box.length, k_max);
    }
    return length_weights(beta, box.d, BoundaryCondition::empty, 0.0, k_max);
}

EstimatorResult Z_cycle(int n, BoxSpec const& box, PairPotential const& p, TimeGrid const& grid, McParams const& mc)
{
    if (n < 1 || n > kMaxCycleN)
    {
        throw std::invalid_argument("Z_cycle: N must lie in [1, 40]");
    }
    auto const partitions = integer_partitions(n);
    auto const weights = cycle_weights(box, grid.beta, n);
    double const volume = box.volume();
    bool const dirichlet = box.bc == BoundaryCondition::dirichlet;

    std::vector<double> prefactor(partitions.size());
    double total_weight = 0.0;
    for (std::size_t l = 0; l < partitions.size(); ++l)
    {
        prefactor[l] = partition_weight(partitions[l], volume, weights);
        total_weight += prefactor[l];
    }
    if (p.is_zero() && !dirichlet)
    {
        return EstimatorResult::exact_value(total_weight);
    }

    InteractionKernel const kernel(p, grid, box);
    BoxSpec const sampling_box = dirichlet ? BoxSpec(box.d, box.length, BoundaryCondition::empty) : box;

    EstimatorResult result;
    result.seed = mc.seed;
    double variance = 0.0;
    for (std::size_t l = 0; l < partitions.size(); ++l)
    {
        auto const budget = std::max(
            kMinSamplesPerTerm,
            static_cast<std::size_t>(std::llround(static_cast<double>(mc.samples) * prefactor[l] / total_weight)));
        auto const& lambda = partitions[l];
        std::vector<double> values(budget);
        parallel_for(budget, mc.threads, [&](std::size_t i) {
            RandomStream rng(mc.seed, {kCycleTag, static_cast<std::uint64_t>(n), l, i});
            std::vector<Bridge> cycles;
            cycles.reserve(static_cast<std::size_t>(lambda.cycles()));
            for (int k = 1; k <= n; ++k)
            {
                for (int c = 0; c < lambda[k]; ++c)
                {
                    cycles.push_back(sample_bridge(sampling_box.uniform_point(rng), k, grid, sampling_box, rng));
                }
            }
            if (dirichlet)
            {
                for (auto const& f : cycles)
                {
                    if (!stays_in_box(f, box))
                    {
                        values[i] = 0.0;
                        return;
                    }
                }
            }
            values[i] = std::exp(-hamiltonian(std::span<Bridge const>(cycles), kernel));
        });
        auto const term = summarize(values, mc.seed);
        result.mean += prefactor[l] * term.mean;
        variance += prefactor[l] * prefactor[l] * term.stderr_ * term.stderr_;
        result.samples += budget;
    }
    result.stderr_ = std::sqrt(variance);
    return result;
}

EstimatorResult Z_bruteforce_perm(int n,
                                  BoxSpec const& box,
                                  PairPotential const& p,
                                  TimeGrid const& grid,
                                  McParams const& mc)
{
    if (n < 1 || n > kMaxPermutationN)
    {
        throw std::invalid_argument("Z_bruteforce_perm: N must lie in [1, 6]");
    }
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::vector<std::vector<int>> perms;
    do
    {
        perms.push_back(sigma);
    } while (std::next_permutation(sigma.begin(), sigma.end()));

    double const volume = box.volume();
    bool const interacting = !p.is_zero();
    InteractionKernel const kernel(p, grid, box);
    BoxSpec const path_box = box.bc == BoundaryCondition::dirichlet
                                 ? BoxSpec(box.d, box.length, BoundaryCondition::empty)
                                 : box;
    auto const per_perm = std::max<std::size_t>(
        kMinSamplesPerTerm, (mc.samples + perms.size() - 1) / perms.size());

    EstimatorResult result;
    result.seed = mc.seed;
    double variance = 0.0;
    double const scale = 1.0 / static_cast<double>(perms.size());
    for (std::size_t s = 0; s < perms.size(); ++s)
    {
        auto const& perm = perms[s];
        std::vector<double> values(per_perm);
        parallel_for(per_perm, mc.threads, [&](std::size_t i) {
            RandomStream rng(mc.seed, {kPermTag, static_cast<std::uint64_t>(n), s, i});
            std::vector<Point> x(static_cast<std::size_t>(n));
            for (auto& xi : x)
            {
                xi = box.uniform_point(rng);
            }
            double weight = 1.0;
            for (int a = 0; a < n; ++a)
            {
                auto const& from = x[static_cast<std::size_t>(a)];
                auto const& to = x[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
                double const g = box.bc == BoundaryCondition::periodic ? periodic_kernel(from, to, grid.beta, box)
                                                                        : free_kernel(from, to, grid.beta, box.d);
                weight *= volume * g;
            }
            if (!interacting && box.bc != BoundaryCondition::dirichlet)
            {
                values[i] = weight;
                return;
            }
            std::vector<Bridge> legs;
            legs.reserve(static_cast<std::size_t>(n));
            for (int a = 0; a < n; ++a)
            {
                legs.push_back(sample_open_bridge(x[static_cast<std::size_t>(a)],
                                                  x[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])],
                                                  grid,
                                                  path_box,
                                                  rng));
                if (box.bc == BoundaryCondition::dirichlet && !stays_in_box(legs.back(), box))
                {
                    values[i] = 0.0;
                    return;
                }
            }
            double const h = interacting ? hamiltonian(std::span<Bridge const>(legs), kernel) : 0.0;
            values[i] = weight * std::exp(-h);
        });
        auto const term = summarize(values, mc.seed);
        result.mean += scale * term.mean;
        variance += scale * scale * term.stderr_ * term.stderr_;
        result.samples += per_perm;
    }
    result.stderr_ = std::sqrt(variance);
    return result;
}

}  // namespace bosegas
