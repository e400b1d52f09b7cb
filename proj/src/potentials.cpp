#include "bosegas/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bosegas {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool condition, char const* message)
{
    if (!condition)
    {
        throw std::invalid_argument(message);
    }
}

void validate(PairPotential::Family const& family)
{
    std::visit(overloaded{
                   [](potential::Zero const&) {},
                   [](potential::Gaussian const& g) {
                       require(g.amplitude >= 0.0, "gaussian potential: amplitude must be >= 0");
                       require(g.width > 0.0, "gaussian potential: width must be > 0");
                   },
                   [](potential::CompactStep const& s) {
                       require(s.height >= 0.0, "step potential: height must be >= 0");
                       require(s.radius > 0.0, "step potential: radius must be > 0");
                   },
                   [](potential::InversePower const& p) {
                       require(p.amplitude >= 0.0, "inverse-power potential: amplitude must be >= 0");
                       require(p.exponent > 0.0, "inverse-power potential: exponent must be > 0");
                       require(p.hard_core >= 0.0, "inverse-power potential: hard core must be >= 0");
                   },
                   [](potential::Tabulated const& t) {
                       require(t.r.size() == t.v.size() && t.r.size() >= 2,
                               "tabulated potential: need >= 2 (r, v) nodes");
                       require(t.r.front() >= 0.0, "tabulated potential: r must be >= 0");
                       for (std::size_t i = 1; i < t.r.size(); ++i)
                       {
                           require(t.r[i] > t.r[i - 1],
                                   "tabulated potential: r grid must be strictly increasing");
                       }
                       for (double v : t.v)
                       {
                           require(v >= 0.0, "tabulated potential: attractive values are not supported");
                       }
                   },
               },
               family);
}

constexpr double kQuadTolerance = 1e-10;

double integrate_piece(auto const& f, double a, double b)
{
    using boost::math::quadrature::gauss_kronrod;
    double error = 0.0;
    return gauss_kronrod<double, 61>::integrate(f, a, b, 20, kQuadTolerance * 1e-2, &error);
}

}  // namespace

PairPotential::PairPotential() : family_(potential::Zero{}) {}

PairPotential::PairPotential(Family family) : family_(std::move(family))
{
    validate(family_);
}

PairPotential PairPotential::gaussian(double amplitude, double width)
{
    return PairPotential(potential::Gaussian{amplitude, width});
}

PairPotential PairPotential::compact_step(double height, double radius)
{
    return PairPotential(potential::CompactStep{height, radius});
}

PairPotential PairPotential::inverse_power(double amplitude, double exponent, double hard_core)
{
    return PairPotential(potential::InversePower{amplitude, exponent, hard_core});
}

PairPotential PairPotential::tabulated(std::vector<double> r, std::vector<double> v)
{
    return PairPotential(potential::Tabulated{std::move(r), std::move(v)});
}

PairPotential PairPotential::from_csv(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open potential table '" + path + "'");
    }
    std::vector<double> r, v;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line[0] == '#')
        {
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
        {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'r,v'");
        }
        try
        {
            double rv = std::stod(line.substr(0, comma));
            double vv = std::stod(line.substr(comma + 1));
            r.push_back(rv);
            v.push_back(vv);
        }
        catch (std::invalid_argument const&)
        {
            if (r.empty())
            {
                continue;  // header row
            }
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number");
        }
    }
    return tabulated(std::move(r), std::move(v));
}

double PairPotential::eval_uncapped(double r) const
{
    return std::visit(overloaded{
                          [](potential::Zero const&) { return 0.0; },
                          [r](potential::Gaussian const& g) {
                              return g.amplitude * std::exp(-(r * r) / (g.width * g.width));
                          },
                          [r](potential::CompactStep const& s) { return r < s.radius ? s.height : 0.0; },
                          [r](potential::InversePower const& p) {
                              if (r < p.hard_core || r == 0.0)
                              {
                                  return kInfiniteEnergy;
                              }
                              return p.amplitude * std::pow(r, -p.exponent);
                          },
                          [r](potential::Tabulated const& t) {
                              if (r <= t.r.front())
                              {
                                  return t.v.front();
                              }
                              if (r > t.r.back())
                              {
                                  return 0.0;
                              }
                              auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
                              auto hi = static_cast<std::size_t>(it - t.r.begin());
                              if (hi >= t.r.size())
                              {
                                  return t.v.back();
                              }
                              std::size_t lo = hi - 1;
                              double w = (r - t.r[lo]) / (t.r[hi] - t.r[lo]);
                              return (1.0 - w) * t.v[lo] + w * t.v[hi];
                          },
                      },
                      family_);
}

double PairPotential::operator()(double r) const
{
    double v = eval_uncapped(r);
    return v < cap_ ? v : cap_;
}

double PairPotential::range() const
{
    return std::visit(overloaded{
                          [](potential::Zero const&) { return 0.0; },
                          [](potential::Gaussian const& g) {
                              return g.amplitude == 0.0 ? 0.0 : kInfiniteEnergy;
                          },
                          [](potential::CompactStep const& s) { return s.height == 0.0 ? 0.0 : s.radius; },
                          [](potential::InversePower const& p) {
                              return p.amplitude == 0.0 && p.hard_core == 0.0 ? 0.0 : kInfiniteEnergy;
                          },
                          [](potential::Tabulated const& t) { return t.r.back(); },
                      },
                      family_);
}

bool PairPotential::is_zero() const
{
    if (cap_ == 0.0)
    {
        return true;
    }
    if (auto const* t = std::get_if<potential::Tabulated>(&family_))
    {
        return std::all_of(t->v.begin(), t->v.end(), [](double v) { return v == 0.0; });
    }
    return range() == 0.0;
}

double PairPotential::supremum() const
{
    double sup = std::visit(overloaded{
                                [](potential::Zero const&) { return 0.0; },
                                [](potential::Gaussian const& g) { return g.amplitude; },
                                [](potential::CompactStep const& s) { return s.height; },
                                [](potential::InversePower const&) { return kInfiniteEnergy; },
                                [](potential::Tabulated const& t) {
                                    return *std::max_element(t.v.begin(), t.v.end());
                                },
                            },
                            family_);
    return std::min(sup, cap_);
}

std::string PairPotential::describe() const
{
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](potential::Zero const&) { os << "zero"; },
                   [&](potential::Gaussian const& g) {
                       os << "gaussian:" << g.amplitude << ":" << g.width;
                   },
                   [&](potential::CompactStep const& s) { os << "step:" << s.height << ":" << s.radius; },
                   [&](potential::InversePower const& p) {
                       os << "power:" << p.amplitude << ":" << p.exponent << ":" << p.hard_core;
                   },
                   [&](potential::Tabulated const& t) { os << "table[" << t.r.size() << "]"; },
               },
               family_);
    if (is_capped())
    {
        os << ":cap=" << cap_;
    }
    return os.str();
}

double eval_potential(PairPotential const& p, double r)
{
    return p(r);
}

PairPotential truncate_potential(PairPotential const& p, double cap)
{
    if (!(cap > 0.0))
    {
        throw std::invalid_argument("truncate_potential: cap must be > 0");
    }
    PairPotential result = p;
    result.cap_ = std::min(p.cap_, cap);
    return result;
}

double unit_sphere_area(int dimension)
{
    switch (dimension)
    {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
}

double unit_ball_volume(int dimension)
{
    return unit_sphere_area(dimension) / dimension;
}

double alpha_v_closed_form(PairPotential const& p, int d)
{
    double const area = unit_sphere_area(d);
    if (p.is_capped())
    {
        throw std::invalid_argument("alpha_v_closed_form: no closed form for capped potentials");
    }
    return std::visit(overloaded{
                          [](potential::Zero const&) { return 0.0; },
                          [d](potential::Gaussian const& g) {
                              return g.amplitude * std::pow(std::numbers::pi * g.width * g.width, 0.5 * d);
                          },
                          [d](potential::CompactStep const& s) {
                              return s.height * unit_ball_volume(d) * std::pow(s.radius, d);
                          },
                          [](potential::InversePower const& p) {
                              return p.amplitude == 0.0 && p.hard_core == 0.0 ? 0.0 : kInfiniteEnergy;
                          },
                          [area, d](potential::Tabulated const& t) {
                              // exact for the piecewise-linear interpolant
                              double total = t.v.front() * std::pow(t.r.front(), d) / d;
                              for (std::size_t i = 1; i < t.r.size(); ++i)
                              {
                                  double a = t.r[i - 1], b = t.r[i];
                                  double slope = (t.v[i] - t.v[i - 1]) / (b - a);
                                  double c0 = t.v[i - 1] - slope * a;
                                  total += c0 * (std::pow(b, d) - std::pow(a, d)) / d
                                           + slope * (std::pow(b, d + 1) - std::pow(a, d + 1)) / (d + 1);
                              }
                              return area * total;
                          },
                      },
                      p.family());
}

double alpha_v(PairPotential const& p, int d)
{
    double const area = unit_sphere_area(d);
    auto radial = [&p, d](double r) {
        double v = p(r);
        if (v == 0.0)
        {
            return 0.0;
        }
        return v * std::pow(r, d - 1);
    };

    return std::visit(
        overloaded{
            [](potential::Zero const&) { return 0.0; },
            [&](potential::Gaussian const& g) {
                if (g.amplitude == 0.0)
                {
                    return 0.0;
                }
                std::vector<double> cuts{0.0};
                if (p.is_capped() && p.cap() < g.amplitude)
                {
                    cuts.push_back(g.width * std::sqrt(std::log(g.amplitude / p.cap())));
                }
                double total = 0.0;
                for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
                {
                    total += integrate_piece(radial, cuts[i], cuts[i + 1]);
                }
                total += integrate_piece(radial, cuts.back(), std::numeric_limits<double>::infinity());
                return area * total;
            },
            [&](potential::CompactStep const& s) {
                return area * integrate_piece(radial, 0.0, s.radius);
            },
            [&](potential::InversePower const& ip) {
                if (ip.amplitude == 0.0 && ip.hard_core == 0.0)
                {
                    return 0.0;
                }
                if (!p.is_capped() || ip.exponent <= d)
                {
                    return kInfiniteEnergy;
                }
                double knee = std::max(ip.hard_core, std::pow(ip.amplitude / p.cap(), 1.0 / ip.exponent));
                double inner = area * p.cap() * std::pow(knee, d) / d;
                if (ip.amplitude == 0.0)
                {
                    return inner;
                }
                return inner + area * integrate_piece(radial, knee, std::numeric_limits<double>::infinity());
            },
            [&](potential::Tabulated const& t) {
                // constant head segment exactly, trapezoid on the grid
                double total = std::min(t.v.front(), p.cap()) * std::pow(t.r.front(), d) / d;
                for (std::size_t i = 1; i < t.r.size(); ++i)
                {
                    total += 0.5 * (t.r[i] - t.r[i - 1]) * (radial(t.r[i - 1]) + radial(t.r[i]));
                }
                return area * total;
            },
        },
        p.family());
}

AssumptionReport check_assumption_v(PairPotential const& p, int d)
{
    AssumptionReport report;
    report.alpha = alpha_v(p, d);
    report.alpha_finite = std::isfinite(report.alpha);

    std::visit(overloaded{
                   [&](potential::Zero const&) {
                       report.tempered = true;
                       report.temper_exponent = kInfiniteEnergy;
                   },
                   [&](potential::Gaussian const&) {
                       report.tempered = true;
                       report.temper_exponent = kInfiniteEnergy;
                   },
                   [&](potential::CompactStep const&) {
                       report.tempered = true;
                       report.temper_exponent = kInfiniteEnergy;
                   },
                   [&](potential::InversePower const& ip) {
                       report.temper_exponent = ip.exponent;
                       report.tempered = ip.amplitude == 0.0 || ip.exponent > d;
                   },
                   [&](potential::Tabulated const& t) {
                       // compact support by the extrapolation rule; the fitted
                       // log-log slope of the positive tail is informational
                       report.tempered = true;
                       std::vector<std::pair<double, double>> tail;
                       for (std::size_t i = t.r.size() / 2; i < t.r.size(); ++i)
                       {
                           if (t.r[i] > 0.0 && t.v[i] > 0.0)
                           {
                               tail.emplace_back(std::log(t.r[i]), std::log(t.v[i]));
                           }
                       }
                       if (tail.size() >= 2)
                       {
                           double mx = 0, my = 0;
                           for (auto [x, y] : tail)
                           {
                               mx += x;
                               my += y;
                           }
                           mx /= tail.size();
                           my /= tail.size();
                           double sxy = 0, sxx = 0;
                           for (auto [x, y] : tail)
                           {
                               sxy += (x - mx) * (y - my);
                               sxx += (x - mx) * (x - mx);
                           }
                           report.temper_exponent = sxx > 0 ? -sxy / sxx : kInfiniteEnergy;
                       }
                       else
                       {
                           report.temper_exponent = kInfiniteEnergy;
                       }
                   },
               },
               p.family());

    report.positive_at_origin = p(0.0) > 0.0;
    bool const full = report.tempered && report.alpha_finite && report.positive_at_origin;
    report.mode = full ? AssumptionMode::full : AssumptionMode::upper_only;
    return report;
}

char const* to_string(AssumptionMode mode)
{
    return mode == AssumptionMode::full ? "full" : "upper-only";
}

}  // namespace bosegas
