#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bosegas/estimator.hpp"
#include "bosegas/rng.hpp"

namespace bosegas {

/// Point in R^d, d <= 3; unused trailing coordinates stay 0.
using Point = std::array<double, 3>;

enum class BoundaryCondition { empty, periodic, dirichlet };

char const* to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(std::string_view name);

/// Centered cube [-L/2, L/2]^d with a boundary condition.
struct BoxSpec
{
    int d = 3;
    double length = 1.0;
    BoundaryCondition bc = BoundaryCondition::empty;

    BoxSpec() = default;
    BoxSpec(int dimension, double side, BoundaryCondition condition);

    static BoxSpec with_volume(int dimension, double volume, BoundaryCondition condition);

    double volume() const;
    bool contains(Point const& x) const;
    /// Reduce each coordinate into [-L/2, L/2).
    Point wrap(Point const& x) const;
    /// Uniform point in the box.
    Point uniform_point(RandomStream& rng) const;
};

/// Each leg [i beta, (i+1) beta] carries `slices` equal steps.
struct TimeGrid
{
    double beta = 1.0;
    int slices = 16;

    TimeGrid() = default;
    TimeGrid(double inverse_temperature, int slices_per_leg);
    double step() const { return beta / slices; }
};

/*!
 * A mark: discretized closed path of k legs attached to an anchor.
 *
 * positions has k * slices + 1 entries; the first and last equal the anchor.
 * Under periodic boundary conditions positions are reduced to the torus and
 * the winding vector records the lattice shift of the unwrapped endpoint.
 */
struct Bridge
{
    Point anchor{};
    int length = 1;
    std::vector<Point> positions;
    std::array<int, 3> winding{};

    Point const& at(int leg, int slice, int slices) const
    {
        return positions[static_cast<std::size_t>(leg * slices + slice)];
    }
};

/// q_k for k = 1..K_max, optionally for a finite box and boundary condition.
struct LengthWeights
{
    double beta = 1.0;
    int d = 3;
    BoundaryCondition bc = BoundaryCondition::empty;
    double box_length = 0.0;
    std::vector<double> q;         // q[k-1] = q_k
    std::vector<double> q_stderr;  // nonzero only for Dirichlet
    double q_bar = 0.0;            // sum of the stored q_k
    double q_bar_stderr = 0.0;

    int k_max() const { return static_cast<int>(q.size()); }
    double operator[](int k) const { return q[static_cast<std::size_t>(k - 1)]; }
};

/// Free heat kernel (4 pi t)^{-d/2} exp(-|x-y|^2 / (4t)) for generator Laplacian.
double free_kernel(Point const& x, Point const& y, double t, int d);

/// Periodic kernel: image sum over z in Z^d of the free kernel at y + zL.
double periodic_kernel(Point const& x, Point const& y, double t, BoxSpec const& box);

/*!
 * Heat kernel for the box's boundary condition.
 *
 * Empty and periodic values are exact. Dirichlet has no closed form and is
 * estimated as g_t(x,y) times the probability that a free bridge stays in
 * the box at all grid times (`slices` steps over [0, t]).
 */
EstimatorResult gaussian_kernel(Point const& x,
                                Point const& y,
                                double t,
                                BoxSpec const& box,
                                McParams const& mc = {},
                                int slices = 16);

/// sum_{n in Z} exp(-a n^2)
double theta_sum(double a);

LengthWeights length_weights(double beta,
                             int d,
                             BoundaryCondition bc,
                             double box_length,
                             int k_max,
                             McParams const& mc = {},
                             int slices = 16);

/// Free (R^d) bridge from a to b over `steps` grid steps of width dt.
void sample_free_bridge_path(Point const& a,
                             Point const& b,
                             int d,
                             int steps,
                             double dt,
                             RandomStream& rng,
                             std::vector<Point>& out);

/*!
 * Closed bridge of k legs from x to x under the box's boundary condition.
 *
 * Periodic: the winding z is drawn with probability proportional to
 * exp(-|z|^2 L^2 / (4 k beta)), then a free bridge to x + Lz is reduced to
 * the torus. Dirichlet: free bridges are resampled until every grid point
 * lies in the box; gives up after mc.max_attempts with SamplingFailure.
 */
Bridge sample_bridge(Point const& x,
                     int k,
                     TimeGrid const& grid,
                     BoxSpec const& box,
                     RandomStream& rng,
                     std::size_t max_attempts = 1000000);

/// One-leg bridge from x to y (duration beta). Periodic paths pick a winding
/// with probability proportional to g_beta(x, y + zL). Dirichlet is not
/// handled here (use a free bridge and test containment).
Bridge sample_open_bridge(Point const& x,
                          Point const& y,
                          TimeGrid const& grid,
                          BoxSpec const& box,
                          RandomStream& rng);

/// True if every grid point of the path lies in the box.
bool stays_in_box(Bridge const& f, BoxSpec const& box);

/// Minimum-image distance on the torus of side L.
double torus_distance(Point const& x, Point const& y, BoxSpec const& box);

/// Distance entering v(|.|): torus distance for periodic bc, Euclidean otherwise.
double box_distance(Point const& x, Point const& y, BoxSpec const& box);

double euclidean_distance(Point const& x, Point const& y);

}  // namespace bosegas
