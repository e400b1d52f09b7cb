#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace bosegas {

/// Energy value used for hard cores. exp(-kInfiniteEnergy) is exactly 0.
inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

namespace potential {

struct Zero {};

/// v(r) = amplitude * exp(-r^2 / width^2)
struct Gaussian {
    double amplitude = 1.0;
    double width = 1.0;
};

/// v(r) = height for r < radius, 0 otherwise.
struct CompactStep {
    double height = 1.0;
    double radius = 1.0;
};

/// v(r) = +inf for r < hard_core, amplitude * r^-exponent otherwise.
struct InversePower {
    double amplitude = 1.0;
    double exponent = 12.0;
    double hard_core = 0.0;
};

/// Piecewise-linear table. Below the first node the first value is used,
/// beyond the last node the potential is 0.
struct Tabulated {
    std::vector<double> r;
    std::vector<double> v;
};

}  // namespace potential

/*!
 * Radial, nonnegative pair potential v: [0, inf) -> [0, inf].
 *
 * Energies carry units of 1/time so that the time integral of v along a
 * pair of paths enters the Boltzmann factor directly. Attractive values are
 * rejected at construction. An optional cap M (see truncate_potential)
 * replaces v by min(v, M) and removes any hard core.
 */
class PairPotential
{
  public:
    using Family = std::variant<potential::Zero,
                                potential::Gaussian,
                                potential::CompactStep,
                                potential::InversePower,
                                potential::Tabulated>;

    PairPotential();
    explicit PairPotential(Family family);

    static PairPotential zero() { return PairPotential{}; }
    static PairPotential gaussian(double amplitude, double width);
    static PairPotential compact_step(double height, double radius);
    static PairPotential inverse_power(double amplitude, double exponent, double hard_core);
    static PairPotential tabulated(std::vector<double> r, std::vector<double> v);

    /// Load a two-column CSV "r,v" (optional header line, '#' comments).
    static PairPotential from_csv(std::string const& path);

    Family const& family() const { return family_; }
    double cap() const { return cap_; }
    bool is_capped() const { return cap_ < kInfiniteEnergy; }

    double operator()(double r) const;

    /// Radius beyond which v vanishes identically, or +inf.
    double range() const;
    /// True if v(r) == 0 for every r.
    bool is_zero() const;
    /// sup_r v(r) (may be +inf).
    double supremum() const;

    std::string describe() const;

  private:
    friend PairPotential truncate_potential(PairPotential const& p, double cap);

    double eval_uncapped(double r) const;

    Family family_;
    double cap_ = kInfiniteEnergy;
};

double eval_potential(PairPotential const& p, double r);

/// v_M = min(v, M). Idempotent; the result has no hard core.
PairPotential truncate_potential(PairPotential const& p, double cap);

/// Integral of v(|x|) over R^d, or +inf when not integrable.
double alpha_v(PairPotential const& p, int dimension);

/// Closed form of alpha_v where one exists (used as a cross-check).
double alpha_v_closed_form(PairPotential const& p, int dimension);

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int dimension);
/// Volume of the unit ball in R^d.
double unit_ball_volume(int dimension);

enum class AssumptionMode { full, upper_only };

struct AssumptionReport
{
    bool tempered = false;
    double temper_exponent = 0.0;  // h of the fitted/declared tail
    bool alpha_finite = false;
    double alpha = 0.0;
    bool positive_at_origin = false;
    AssumptionMode mode = AssumptionMode::upper_only;
};

AssumptionReport check_assumption_v(PairPotential const& p, int dimension);

char const* to_string(AssumptionMode mode);

}  // namespace bosegas
