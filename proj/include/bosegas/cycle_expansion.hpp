#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bosegas/bridges.hpp"
#include "bosegas/estimator.hpp"
#include "bosegas/potentials.hpp"

namespace bosegas {

/// Occupation numbers lambda_k (k = 1..N) with sum_k k lambda_k = N.
struct IntegerPartition
{
    int n = 0;
    std::vector<int> occupation;  // occupation[k-1] = lambda_k

    int operator[](int k) const { return occupation[static_cast<std::size_t>(k - 1)]; }
    int cycles() const;
    bool valid() const;
};

/*!
 * Enumerates the partitions of N in lexicographic order of
 * (lambda_N, ..., lambda_1), starting from the all-ones partition.
 */
class PartitionEnumerator
{
  public:
    explicit PartitionEnumerator(int n);

    IntegerPartition const& current() const { return current_; }
    /// Advance; false once the last partition (a single N-cycle) was passed.
    bool next();

  private:
    IntegerPartition current_;
};

std::vector<IntegerPartition> integer_partitions(int n);

/// Number of partitions of N without storing them.
std::uint64_t count_partitions(int n);

/// Size of the conjugacy class of S_N with cycle type lambda (exact, N <= 20).
std::uint64_t class_size(IntegerPartition const& lambda);

/// A(lambda) / N! = 1 / prod_k (lambda_k! k^lambda_k).
double class_fraction(IntegerPartition const& lambda);

/// prod_k (|box| q_k)^lambda_k / lambda_k!
double partition_weight(IntegerPartition const& lambda, double volume, LengthWeights const& weights);

/// Exact cycle weights for the box: periodic image sums, free weights otherwise.
LengthWeights cycle_weights(BoxSpec const& box, double beta, int k_max);

/*!
 * Z_N by the cycle expansion: a sum over partitions of the combinatorial
 * weight times E[exp(-G)], with cycle starts uniform in the box and closed
 * bridges of length k beta. For v == 0 (and non-Dirichlet bc) every
 * expectation is 1 and the value is exact. Dirichlet uses free bridges and
 * scores paths leaving the box as zero. Samples are split between
 * partitions in proportion to their weight.
 */
EstimatorResult Z_cycle(int n, BoxSpec const& box, PairPotential const& p, TimeGrid const& grid, McParams const& mc);

/*!
 * Z_N by direct summation over permutations:
 * (1/N!) sum_sigma int_box dx prod_i mu_{x_i, x_sigma(i)}[exp(-sum_{i<j} int v)].
 * Each sigma is estimated with uniform x_i, normalized one-leg bridges and
 * the importance weight |box|^N prod_i g(x_i, x_sigma(i)). N <= 6.
 */
EstimatorResult Z_bruteforce_perm(int n,
                                  BoxSpec const& box,
                                  PairPotential const& p,
                                  TimeGrid const& grid,
                                  McParams const& mc);

inline constexpr int kMaxCycleN = 40;
inline constexpr int kMaxPermutationN = 6;

}  // namespace bosegas
