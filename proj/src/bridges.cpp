#include "bosegas/bridges.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bosegas/parallel.hpp"

namespace bosegas {

namespace {

constexpr double kShellTolerance = 1e-16;
constexpr double kWindingTolerance = 1e-15;

double sq(double x)
{
    return x * x;
}

/*!
 * Draw n in Z with probability proportional to exp(-(delta - n L)^2 / (4T)).
 *
 * Candidates are enumerated outward from the nearest image until a shell's
 * weight drops below kWindingTolerance of the accumulated mass.
 */
int sample_winding_axis(double delta, double length, double duration, RandomStream& rng)
{
    int const center = static_cast<int>(std::lround(delta / length));
    auto weight = [&](int n) { return std::exp(-sq(delta - n * length) / (4.0 * duration)); };

    std::vector<std::pair<int, double>> candidates{{center, weight(center)}};
    double total = candidates.front().second;
    for (int s = 1;; ++s)
    {
        double const wm = weight(center - s);
        double const wp = weight(center + s);
        candidates.emplace_back(center - s, wm);
        candidates.emplace_back(center + s, wp);
        total += wm + wp;
        if (wm + wp < kWindingTolerance * total)
        {
            break;
        }
    }
    double u = rng.uniform() * total;
    for (auto const& [n, w] : candidates)
    {
        if (u < w)
        {
            return n;
        }
        u -= w;
    }
    return center;
}

}  // namespace

char const* to_string(BoundaryCondition bc)
{
    switch (bc)
    {
    case BoundaryCondition::empty: return "empty";
    case BoundaryCondition::periodic: return "periodic";
    case BoundaryCondition::dirichlet: return "dirichlet";
    }
    return "?";
}

BoundaryCondition parse_boundary_condition(std::string_view name)
{
    if (name == "empty" || name == "free" || name == "none")
    {
        return BoundaryCondition::empty;
    }
    if (name == "periodic" || name == "per")
    {
        return BoundaryCondition::periodic;
    }
    if (name == "dirichlet" || name == "dir")
    {
        return BoundaryCondition::dirichlet;
    }
    throw std::invalid_argument("unknown boundary condition '" + std::string(name) + "'");
}

BoxSpec::BoxSpec(int dimension, double side, BoundaryCondition condition)
    : d(dimension), length(side), bc(condition)
{
    if (d < 1 || d > 3)
    {
        throw std::invalid_argument("box dimension must be 1, 2 or 3");
    }
    if (!(length > 0.0))
    {
        throw std::invalid_argument("box side length must be > 0");
    }
}

BoxSpec BoxSpec::with_volume(int dimension, double volume, BoundaryCondition condition)
{
    return BoxSpec(dimension, std::pow(volume, 1.0 / dimension), condition);
}

double BoxSpec::volume() const
{
    return std::pow(length, d);
}

bool BoxSpec::contains(Point const& x) const
{
    double const half = 0.5 * length;
    for (int i = 0; i < d; ++i)
    {
        if (x[i] < -half || x[i] > half)
        {
            return false;
        }
    }
    return true;
}

Point BoxSpec::wrap(Point const& x) const
{
    Point y = x;
    for (int i = 0; i < d; ++i)
    {
        y[i] = x[i] - length * std::floor((x[i] + 0.5 * length) / length);
        if (y[i] >= 0.5 * length)
        {
            y[i] -= length;
        }
    }
    return y;
}

Point BoxSpec::uniform_point(RandomStream& rng) const
{
    Point x{};
    for (int i = 0; i < d; ++i)
    {
        x[i] = rng.uniform(-0.5 * length, 0.5 * length);
    }
    return x;
}

TimeGrid::TimeGrid(double inverse_temperature, int slices_per_leg)
    : beta(inverse_temperature), slices(slices_per_leg)
{
    if (!(beta > 0.0))
    {
        throw std::invalid_argument("beta must be > 0");
    }
    if (slices < 2)
    {
        throw std::invalid_argument("time grid needs at least 2 slices per leg");
    }
}

double euclidean_distance(Point const& x, Point const& y)
{
    return std::sqrt(sq(x[0] - y[0]) + sq(x[1] - y[1]) + sq(x[2] - y[2]));
}

double torus_distance(Point const& x, Point const& y, BoxSpec const& box)
{
    double s = 0.0;
    for (int i = 0; i < box.d; ++i)
    {
        double delta = x[i] - y[i];
        delta -= box.length * std::nearbyint(delta / box.length);
        s += delta * delta;
    }
    return std::sqrt(s);
}

double box_distance(Point const& x, Point const& y, BoxSpec const& box)
{
    return box.bc == BoundaryCondition::periodic ? torus_distance(x, y, box) : euclidean_distance(x, y);
}

double free_kernel(Point const& x, Point const& y, double t, int d)
{
    if (!(t > 0.0))
    {
        throw std::invalid_argument("heat kernel: time must be > 0");
    }
    double const r2 = sq(x[0] - y[0]) + sq(x[1] - y[1]) + sq(x[2] - y[2]);
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * d) * std::exp(-r2 / (4.0 * t));
}

double periodic_kernel(Point const& x, Point const& y, double t, BoxSpec const& box)
{
    if (!(t > 0.0))
    {
        throw std::invalid_argument("heat kernel: time must be > 0");
    }
    // the image sum factorizes over axes
    double product = std::pow(4.0 * std::numbers::pi * t, -0.5 * box.d);
    for (int i = 0; i < box.d; ++i)
    {
        double const delta = x[i] - y[i];
        auto term = [&](int n) { return std::exp(-sq(delta - n * box.length) / (4.0 * t)); };
        int const center = static_cast<int>(std::lround(delta / box.length));
        double sum = term(center);
        for (int s = 1;; ++s)
        {
            double const shell = term(center - s) + term(center + s);
            sum += shell;
            if (shell <= kShellTolerance * sum)
            {
                break;
            }
        }
        product *= sum;
    }
    return product;
}

double theta_sum(double a)
{
    double sum = 1.0;
    for (int n = 1;; ++n)
    {
        double const term = 2.0 * std::exp(-a * n * n);
        sum += term;
        if (term <= kShellTolerance * sum)
        {
            break;
        }
    }
    return sum;
}

void sample_free_bridge_path(Point const& a,
                             Point const& b,
                             int d,
                             int steps,
                             double dt,
                             RandomStream& rng,
                             std::vector<Point>& out)
{
    out.resize(static_cast<std::size_t>(steps) + 1);
    out[0] = a;
    double const total = steps * dt;
    Point cur = a;
    for (int j = 0; j + 1 < steps; ++j)
    {
        double const remaining = total - j * dt;        // T - t_j
        double const after = total - (j + 1) * dt;      // T - t_{j+1}
        double const frac = dt / remaining;
        double const sd = std::sqrt(2.0 * dt * after / remaining);
        Point next{};
        for (int i = 0; i < d; ++i)
        {
            next[i] = cur[i] + (b[i] - cur[i]) * frac + sd * rng.normal();
        }
        out[static_cast<std::size_t>(j) + 1] = next;
        cur = next;
    }
    out[static_cast<std::size_t>(steps)] = b;
}

bool stays_in_box(Bridge const& f, BoxSpec const& box)
{
    for (auto const& p : f.positions)
    {
        if (!box.contains(p))
        {
            return false;
        }
    }
    return true;
}

Bridge sample_bridge(Point const& x,
                     int k,
                     TimeGrid const& grid,
                     BoxSpec const& box,
                     RandomStream& rng,
                     std::size_t max_attempts)
{
    if (k < 1)
    {
        throw std::invalid_argument("bridge length must be >= 1");
    }
    Bridge f;
    f.anchor = x;
    f.length = k;
    int const steps = k * grid.slices;
    double const duration = k * grid.beta;

    switch (box.bc)
    {
    case BoundaryCondition::empty:
        sample_free_bridge_path(x, x, box.d, steps, grid.step(), rng, f.positions);
        break;
    case BoundaryCondition::periodic: {
        Point end = x;
        for (int i = 0; i < box.d; ++i)
        {
            f.winding[i] = sample_winding_axis(0.0, box.length, duration, rng);
            end[i] = x[i] + box.length * f.winding[i];
        }
        sample_free_bridge_path(x, end, box.d, steps, grid.step(), rng, f.positions);
        for (auto& p : f.positions)
        {
            p = box.wrap(p);
        }
        f.positions.front() = x;
        f.positions.back() = x;
        break;
    }
    case BoundaryCondition::dirichlet: {
        std::size_t attempts = 0;
        for (;;)
        {
            ++attempts;
            sample_free_bridge_path(x, x, box.d, steps, grid.step(), rng, f.positions);
            if (stays_in_box(f, box))
            {
                break;
            }
            if (attempts >= max_attempts)
            {
                throw SamplingFailure("dirichlet bridge rejection exhausted its attempt budget",
                                      1.0 / static_cast<double>(attempts));
            }
        }
        break;
    }
    }
    return f;
}

Bridge sample_open_bridge(Point const& x,
                          Point const& y,
                          TimeGrid const& grid,
                          BoxSpec const& box,
                          RandomStream& rng)
{
    Bridge f;
    f.anchor = x;
    f.length = 1;
    if (box.bc == BoundaryCondition::periodic)
    {
        Point end = y;
        for (int i = 0; i < box.d; ++i)
        {
            // weight g(x, y + zL) depends on x - y - zL
            int const z = sample_winding_axis(x[i] - y[i], box.length, grid.beta, rng);
            f.winding[i] = z;
            end[i] = y[i] + z * box.length;
        }
        sample_free_bridge_path(x, end, box.d, grid.slices, grid.step(), rng, f.positions);
        for (auto& p : f.positions)
        {
            p = box.wrap(p);
        }
        f.positions.front() = x;
        f.positions.back() = y;
        return f;
    }
    sample_free_bridge_path(x, y, box.d, grid.slices, grid.step(), rng, f.positions);
    return f;
}

EstimatorResult gaussian_kernel(Point const& x,
                                Point const& y,
                                double t,
                                BoxSpec const& box,
                                McParams const& mc,
                                int slices)
{
    if (!(t > 0.0))
    {
        throw std::invalid_argument("heat kernel: time must be > 0");
    }
    switch (box.bc)
    {
    case BoundaryCondition::empty: return EstimatorResult::exact_value(free_kernel(x, y, t, box.d));
    case BoundaryCondition::periodic: return EstimatorResult::exact_value(periodic_kernel(x, y, t, box));
    case BoundaryCondition::dirichlet: break;
    }
    if (!box.contains(x) || !box.contains(y))
    {
        return EstimatorResult::exact_value(0.0);
    }
    double const g = free_kernel(x, y, t, box.d);
    std::vector<double> values(mc.samples);
    parallel_for(mc.samples, mc.threads, [&](std::size_t i) {
        RandomStream rng(mc.seed, {0x6b65726eULL, i});
        Bridge f;
        sample_free_bridge_path(x, y, box.d, slices, t / slices, rng, f.positions);
        values[i] = stays_in_box(f, box) ? g : 0.0;
    });
    return summarize(values, mc.seed);
}

LengthWeights length_weights(double beta,
                             int d,
                             BoundaryCondition bc,
                             double box_length,
                             int k_max,
                             McParams const& mc,
                             int slices)
{
    if (k_max < 1)
    {
        throw std::invalid_argument("length_weights: K_max must be >= 1");
    }
    if (!(beta > 0.0))
    {
        throw std::invalid_argument("length_weights: beta must be > 0");
    }
    if (bc != BoundaryCondition::empty && !(box_length > 0.0))
    {
        throw std::invalid_argument("length_weights: box length must be > 0 for this boundary condition");
    }
    LengthWeights w;
    w.beta = beta;
    w.d = d;
    w.bc = bc;
    w.box_length = box_length;
    w.q.resize(static_cast<std::size_t>(k_max));
    w.q_stderr.assign(static_cast<std::size_t>(k_max), 0.0);

    double const prefactor = std::pow(4.0 * std::numbers::pi * beta, -0.5 * d);
    for (int k = 1; k <= k_max; ++k)
    {
        w.q[static_cast<std::size_t>(k - 1)] = prefactor * std::pow(static_cast<double>(k), -1.0 - 0.5 * d);
    }

    if (bc == BoundaryCondition::periodic)
    {
        for (int k = 1; k <= k_max; ++k)
        {
            double const a = box_length * box_length / (4.0 * k * beta);
            w.q[static_cast<std::size_t>(k - 1)] *= std::pow(theta_sum(a), d);
        }
    }
    else if (bc == BoundaryCondition::dirichlet)
    {
        BoxSpec const box(d, box_length, bc);
        TimeGrid const grid(beta, slices);
        double var_bar = 0.0;
        for (int k = 1; k <= k_max; ++k)
        {
            std::vector<double> inside(mc.samples);
            parallel_for(mc.samples, mc.threads, [&](std::size_t i) {
                RandomStream rng(mc.seed, {0x71646972ULL, static_cast<std::uint64_t>(k), i});
                Point const x = box.uniform_point(rng);
                Bridge f;
                sample_free_bridge_path(x, x, d, k * grid.slices, grid.step(), rng, f.positions);
                inside[i] = stays_in_box(f, box) ? 1.0 : 0.0;
            });
            auto const p = summarize(inside, mc.seed);
            auto const idx = static_cast<std::size_t>(k - 1);
            w.q_stderr[idx] = w.q[idx] * p.stderr_;
            w.q[idx] *= p.mean;
            var_bar += w.q_stderr[idx] * w.q_stderr[idx];
        }
        w.q_bar_stderr = std::sqrt(var_bar);
    }

    // sum smallest terms first
    double sum = 0.0;
    for (int k = k_max; k >= 1; --k)
    {
        sum += w.q[static_cast<std::size_t>(k - 1)];
    }
    w.q_bar = sum;
    return w;
}

}  // namespace bosegas
