#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bosegas/bridges.hpp"
#include "bosegas/estimator.hpp"
#include "bosegas/potentials.hpp"

namespace bosegas {

/// Finite marked configuration: one Bridge (anchor + mark) per particle.
struct MarkedConfiguration
{
    BoxSpec box;
    std::vector<Bridge> particles;
    std::uint64_t seed = 0;
};

/// Axis-aligned region [lower, upper] used for particle and length counts.
struct Region
{
    Point lower{};
    Point upper{};
    int d = 3;

    static Region centered(int d, double side);
    static Region of(BoxSpec const& box) { return centered(box.d, box.length); }
    bool contains(Point const& x) const;
};

/*!
 * Time-integrated leg-pair interaction.
 *
 * leg_pair(a, i, b, j) is the trapezoid approximation of
 * int_0^beta v(|a(i beta + s) - (b(j beta + s) + shift)|) ds on the shared grid.
 * The Hamiltonian, the pair terms T_{x,y} and the cycle energies all reduce
 * to sums of leg_pair and go through this one implementation.
 */
class InteractionKernel
{
  public:
    InteractionKernel(PairPotential const& potential, TimeGrid const& grid, BoxSpec const& box);

    double leg_pair(Bridge const& a, int i, Bridge const& b, int j, Point const& shift = {}) const;

    /// Sum over all leg pairs (i, j) of two distinct marks.
    double between(Bridge const& a, Bridge const& b, Point const& shift = {}) const;
    /// Sum over ordered leg pairs i != j of one mark.
    double self(Bridge const& a) const;

    PairPotential const& potential() const { return potential_; }
    TimeGrid const& grid() const { return grid_; }
    BoxSpec const& box() const { return box_; }

  private:
    double distance(Point const& x, Point const& y) const;

    PairPotential potential_;
    TimeGrid grid_;
    BoxSpec box_;
};

/// T_{x,y}: half the leg-pair sum excluding (x,i) == (y,j).
double pair_interaction(MarkedConfiguration const& omega,
                        std::size_t x_idx,
                        std::size_t y_idx,
                        PairPotential const& p,
                        TimeGrid const& grid);

/// H = sum over ordered (x, y) of anchors in the box, x == y included.
double hamiltonian(MarkedConfiguration const& omega, PairPotential const& p, TimeGrid const& grid);

/// Same sum over an arbitrary set of marks (all counted).
double hamiltonian(std::span<Bridge const> marks, InteractionKernel const& kernel);

/// Sum of mark lengths over particles anchored in the region.
long total_mark_length(MarkedConfiguration const& omega, Region const& region);

/// Particle count in the region.
long particle_count(MarkedConfiguration const& omega, Region const& region);

/*!
 * Marked Poisson configuration in the box.
 *
 * Count ~ Poisson(q_bar |box|) with the given (truncated) weights, lengths
 * i.i.d. proportional to q_k, bridges from sample_bridge. Under Dirichlet bc
 * anchor and path are accepted jointly (anchor density proportional to the
 * Dirichlet kernel on the diagonal).
 */
MarkedConfiguration sample_marked_poisson(BoxSpec const& box,
                                          LengthWeights const& weights,
                                          TimeGrid const& grid,
                                          RandomStream& rng,
                                          std::size_t max_attempts = 1000000);

/*!
 * Exact law of the total mark length sum_k k N_k, N_k ~ Poisson(|box| q_k).
 *
 * Built as a convolution over k = 1..min(K_max, N). weight_sum() is
 * e^{|box| q_bar} P(total = N) = sum over partitions of prod (|box| q_k)^l_k / l_k!,
 * and sample() draws occupation numbers conditioned on total = N backwards
 * through the stages.
 */
class LengthConstraintDP
{
  public:
    LengthConstraintDP(double volume, LengthWeights const& weights, int total);

    int total() const { return total_; }
    int stages() const { return stages_; }
    /// P(sum_k k N_k = total), with the reference intensity q_bar of the weights.
    double probability() const;
    double weight_sum() const { return table_.back()[static_cast<std::size_t>(total_)]; }
    /// Occupation numbers lambda[k-1], k = 1..total.
    std::vector<int> sample(RandomStream& rng) const;

  private:
    double volume_;
    double q_bar_;
    int total_;
    int stages_;
    std::vector<double> intensity_;            // |box| q_k
    std::vector<std::vector<double>> table_;   // table_[k][n], k = 0..stages
};

/*!
 * Z_N via the marked-Poisson representation.
 *
 * Z_N = e^{|box| q_bar} P(N^l = N) E[e^{-H} | N^l = N]. The first factor is the
 * exact DP weight; the conditional expectation is a Monte Carlo average over
 * occupation numbers drawn from the DP, uniform anchors and fresh bridges.
 * For v == 0 the result is exact. Under Dirichlet bc the reference weights
 * are the free ones and paths that leave the box score zero.
 *
 * Sample i uses stream (seed, tag, i) independent of N, so estimates for
 * different N share random numbers.
 */
EstimatorResult estimate_Z_poisson(int n,
                                   BoxSpec const& box,
                                   PairPotential const& p,
                                   TimeGrid const& grid,
                                   LengthWeights const& weights,
                                   McParams const& mc);

}  // namespace bosegas
