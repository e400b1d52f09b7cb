#pragma once

#include <span>
#include <vector>

#include "bosegas/bridges.hpp"
#include "bosegas/poisson_field.hpp"
#include "bosegas/potentials.hpp"

namespace bosegas {

/*!
 * Truncation parameters of the local functional: R is the side of the
 * interaction window Lambda_R, M caps the potential, K bounds the mark
 * length and S the local particle count.
 */
struct TruncationParams
{
    double R = 3.0;
    double M = 10.0;
    int K = 8;
    int S = 20;

    void validate() const;
};

/*!
 * Lambda-periodic continuation of the restriction of a configuration to its box.
 *
 * Every anchor x in the box is repeated at x + L z for z in Z^d, carrying
 * its path translated by L z. Paths are read as curves in R^d (the box's
 * boundary condition is ignored). Images are produced on demand for a
 * query region.
 */
class PeriodicView
{
  public:
    struct Image
    {
        std::size_t base = 0;  // index into base()
        Point shift{};         // L z
        Point anchor{};
    };

    explicit PeriodicView(MarkedConfiguration const& omega);

    /// Images whose anchors lie in the region (closed), ordered by base then z.
    std::vector<Image> images_in(Region const& query) const;
    /// The image as a standalone mark, translated by an extra offset.
    Bridge materialize(Image const& image, Point const& offset = {}) const;

    double length() const { return length_; }
    int dimension() const { return d_; }
    std::vector<Bridge> const& base() const { return base_; }
    /// Largest sup-norm excursion of any base path from its anchor.
    double max_excursion() const { return max_excursion_; }

  private:
    std::vector<Bridge> base_;
    double length_;
    int d_;
    double max_excursion_ = 0.0;
};

/// Bridge translated by a shift (anchor and path).
Bridge translated(Bridge const& f, Point const& shift);

/// Volume of Lambda cap (x + U) for the unit cube U.
double unit_overlap(Point const& x, double box_length, int d);

struct FieldPairLength
{
    double via_overlaps = 0.0;  // (1/|Lambda|) sum over images of l(f_x) |Lambda cap (x+U)|
    double via_count = 0.0;     // N^(l)_Lambda / |Lambda|
};

/// <R_{Lambda,omega}, N_U^(l)> both ways; throws std::logic_error if they differ by more than 1e-12.
FieldPairLength field_pair_length(MarkedConfiguration const& omega);

/*!
 * |Lambda| <R_{Lambda,omega}, Phi_beta>
 *   = sum over images x in Lambda_{L+1} of |Lambda cap (x+U)| sum_y T_{x,y}(omega_(Lambda)),
 * with y over every image whose path comes within the interaction range.
 * Requires range(v) <= L/2 - 1.
 */
double field_pair_phi(MarkedConfiguration const& omega, PairPotential const& p, TimeGrid const& grid);

/// T_{x,y} with Euclidean distances; x and y the same mark gives the self term.
double pair_term(Bridge const& x, Bridge const& y, bool same, InteractionKernel const& kernel);

/*!
 * Phi^(R,M,K)(omega) = sum_{x in U, l_x <= K} sum_{y in Lambda_R, l_y <= K} T^(M)_{x,y}
 * over a window of an infinite configuration given as a list of marks.
 * Marks are identified by index: x == y means the same element.
 */
double phi_truncated(std::span<Bridge const> field,
                     TruncationParams const& params,
                     PairPotential const& p,
                     TimeGrid const& grid);

/// Side-(R-1)/(2 sqrt d) cubes needed to cover Lambda_{R+1}.
long covering_number(double R, int d);

struct HamiltonianBoundReport
{
    double hamiltonian = 0.0;
    /// |Lambda| <R_{Lambda,omega}, Phi^(R,M,K) 1{N_{Lambda_R} <= S}>
    double field_term = 0.0;
    long boundary_count = 0;  // N_{Lambda_L \ Lambda_{L-R-2}}
    long r = 0;
    double C = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // hamiltonian - rhs
    bool holds = false;  // up to a relative rounding tolerance of 1e-12
};

/*!
 * Both sides of H_Lambda >= |Lambda| <R, Phi^(R,M,K) 1{N_{Lambda_R} <= S}> - C N_boundary.
 *
 * The shift integral is exact: for every image pair (x, y) the shifts z in
 * Lambda cap (x+U) cap (y+Lambda_R) are cut into cells by the faces of the
 * windows w + Lambda_R of all images w, the count is constant on each cell,
 * and the volumes of cells with count <= S are summed.
 */
HamiltonianBoundReport check_hamiltonian_lower_bound(MarkedConfiguration const& omega,
                                                     TruncationParams const& params,
                                                     PairPotential const& p,
                                                     TimeGrid const& grid);

/// MC value of the same field term from uniform shifts z (test oracle for the exact cell sum).
EstimatorResult field_term_by_shifts(MarkedConfiguration const& omega,
                                     TruncationParams const& params,
                                     PairPotential const& p,
                                     TimeGrid const& grid,
                                     McParams const& mc);

}  // namespace bosegas
