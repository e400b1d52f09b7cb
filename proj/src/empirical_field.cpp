#include "bosegas/empirical_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "bosegas/parallel.hpp"

namespace bosegas {

namespace {

constexpr std::uint64_t kShiftTag = 0x73686966ULL;

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi > lo ? hi - lo : 0.0; }
};

Point add(Point a, Point const& b)
{
    for (int i = 0; i < 3; ++i)
    {
        a[i] += b[i];
    }
    return a;
}

Point sub(Point a, Point const& b)
{
    for (int i = 0; i < 3; ++i)
    {
        a[i] -= b[i];
    }
    return a;
}

double sup_distance(Point const& a, Point const& b, int d)
{
    double m = 0.0;
    for (int i = 0; i < d; ++i)
    {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

Region window(Point const& center, double side, int d)
{
    Region r = Region::centered(d, side);
    for (int i = 0; i < d; ++i)
    {
        r.lower[i] += center[i];
        r.upper[i] += center[i];
    }
    return r;
}

InteractionKernel euclidean_kernel(PairPotential const& p, TimeGrid const& grid, int d)
{
    return InteractionKernel(p, grid, BoxSpec(d, 1.0, BoundaryCondition::empty));
}

/*!
 * Volume of {z in B : #{w : |z - w|_inf < R/2} <= S}.
 *
 * Per axis the faces w_a +- R/2 inside B cut B into slabs; on each product
 * cell the count is constant and is read off at the cell center.
 */
double indicator_volume(std::array<Interval, 3> const& b,
                        int d,
                        std::vector<Point> const& centers,
                        double R,
                        int S)
{
    double const h = 0.5 * R;
    std::vector<std::size_t> relevant;
    for (std::size_t w = 0; w < centers.size(); ++w)
    {
        bool hit = true;
        for (int a = 0; a < d && hit; ++a)
        {
            hit = centers[w][a] + h > b[a].lo && centers[w][a] - h < b[a].hi;
        }
        if (hit)
        {
            relevant.push_back(w);
        }
    }
    double full = 1.0;
    for (int a = 0; a < d; ++a)
    {
        full *= b[a].width();
    }
    if (static_cast<long>(relevant.size()) <= S)
    {
        return full;
    }

    std::size_t const words = (relevant.size() + 63) / 64;
    // per axis: slab edges and, per slab, the bitset of windows covering it
    std::array<std::vector<double>, 3> edges;
    std::array<std::vector<std::vector<std::uint64_t>>, 3> cover;
    for (int a = 0; a < d; ++a)
    {
        auto& e = edges[a];
        e = {b[a].lo, b[a].hi};
        for (auto w : relevant)
        {
            for (double f : {centers[w][a] - h, centers[w][a] + h})
            {
                if (f > b[a].lo && f < b[a].hi)
                {
                    e.push_back(f);
                }
            }
        }
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        cover[a].assign(e.size() - 1, std::vector<std::uint64_t>(words, 0));
        for (std::size_t s = 0; s + 1 < e.size(); ++s)
        {
            double const mid = 0.5 * (e[s] + e[s + 1]);
            for (std::size_t r = 0; r < relevant.size(); ++r)
            {
                if (std::abs(mid - centers[relevant[r]][a]) < h)
                {
                    cover[a][s][r / 64] |= std::uint64_t{1} << (r % 64);
                }
            }
        }
    }
    for (int a = d; a < 3; ++a)
    {
        edges[a] = {0.0, 1.0};
        cover[a].assign(1, std::vector<std::uint64_t>(words, ~std::uint64_t{0}));
    }

    double volume = 0.0;
    std::vector<std::uint64_t> both(words);
    for (std::size_t i = 0; i + 1 < edges[0].size(); ++i)
    {
        for (std::size_t j = 0; j + 1 < edges[1].size(); ++j)
        {
            for (std::size_t w = 0; w < words; ++w)
            {
                both[w] = cover[0][i][w] & cover[1][j][w];
            }
            for (std::size_t k = 0; k + 1 < edges[2].size(); ++k)
            {
                long count = 0;
                for (std::size_t w = 0; w < words; ++w)
                {
                    count += std::popcount(both[w] & cover[2][k][w]);
                }
                if (count <= S)
                {
                    volume += (edges[0][i + 1] - edges[0][i]) * (edges[1][j + 1] - edges[1][j])
                              * (edges[2][k + 1] - edges[2][k]);
                }
            }
        }
    }
    return volume;
}

}  // namespace

void TruncationParams::validate() const
{
    if (!(R > 1.0) || !(M > 0.0) || K < 1 || S < 1)
    {
        throw std::invalid_argument("truncation parameters: need R > 1, M > 0, K >= 1, S >= 1");
    }
}

PeriodicView::PeriodicView(MarkedConfiguration const& omega) : length_(omega.box.length), d_(omega.box.d)
{
    for (auto const& f : omega.particles)
    {
        if (!omega.box.contains(f.anchor))
        {
            continue;
        }
        for (auto const& pos : f.positions)
        {
            max_excursion_ = std::max(max_excursion_, sup_distance(pos, f.anchor, d_));
        }
        base_.push_back(f);
    }
}

std::vector<PeriodicView::Image> PeriodicView::images_in(Region const& query) const
{
    std::vector<Image> out;
    for (std::size_t b = 0; b < base_.size(); ++b)
    {
        Point const& x = base_[b].anchor;
        std::array<long, 3> lo{0, 0, 0};
        std::array<long, 3> hi{0, 0, 0};
        bool empty = false;
        for (int a = 0; a < d_; ++a)
        {
            lo[a] = static_cast<long>(std::ceil((query.lower[a] - x[a]) / length_));
            hi[a] = static_cast<long>(std::floor((query.upper[a] - x[a]) / length_));
            empty = empty || lo[a] > hi[a];
        }
        if (empty)
        {
            continue;
        }
        for (long z0 = lo[0]; z0 <= hi[0]; ++z0)
        {
            for (long z1 = lo[1]; z1 <= hi[1]; ++z1)
            {
                for (long z2 = lo[2]; z2 <= hi[2]; ++z2)
                {
                    Image img;
                    img.base = b;
                    img.shift = {z0 * length_, z1 * length_, z2 * length_};
                    img.anchor = add(x, img.shift);
                    if (query.contains(img.anchor))
                    {
                        out.push_back(img);
                    }
                }
            }
        }
    }
    return out;
}

Bridge PeriodicView::materialize(Image const& image, Point const& offset) const
{
    return translated(base_[image.base], add(image.shift, offset));
}

Bridge translated(Bridge const& f, Point const& shift)
{
    Bridge g = f;
    g.anchor = add(g.anchor, shift);
    for (auto& pos : g.positions)
    {
        pos = add(pos, shift);
    }
    return g;
}

double unit_overlap(Point const& x, double box_length, int d)
{
    double v = 1.0;
    for (int a = 0; a < d; ++a)
    {
        double const lo = std::max(-0.5 * box_length, x[a] - 0.5);
        double const hi = std::min(0.5 * box_length, x[a] + 0.5);
        v *= hi > lo ? hi - lo : 0.0;
    }
    return v;
}

FieldPairLength field_pair_length(MarkedConfiguration const& omega)
{
    double const L = omega.box.length;
    int const d = omega.box.d;
    if (!(L > 1.0))
    {
        throw std::invalid_argument("field_pair_length: box side must exceed 1");
    }
    PeriodicView const view(omega);
    double const volume = omega.box.volume();

    FieldPairLength out;
    double overlap_sum = 0.0;
    for (auto const& img : view.images_in(Region::centered(d, L + 1.0)))
    {
        overlap_sum += view.base()[img.base].length * unit_overlap(img.anchor, L, d);
    }
    out.via_overlaps = overlap_sum / volume;
    out.via_count = static_cast<double>(total_mark_length(omega, Region::of(omega.box))) / volume;
    if (std::abs(out.via_overlaps - out.via_count) > 1e-12)
    {
        throw std::logic_error("field_pair_length: overlap sum " + std::to_string(out.via_overlaps)
                               + " differs from the mark-length count " + std::to_string(out.via_count));
    }
    return out;
}

double pair_term(Bridge const& x, Bridge const& y, bool same, InteractionKernel const& kernel)
{
    return same ? 0.5 * kernel.self(x) : 0.5 * kernel.between(x, y);
}

double field_pair_phi(MarkedConfiguration const& omega, PairPotential const& p, TimeGrid const& grid)
{
    double const L = omega.box.length;
    int const d = omega.box.d;
    if (!(L > 1.0))
    {
        throw std::invalid_argument("field_pair_phi: box side must exceed 1");
    }
    if (!(p.range() <= 0.5 * L - 1.0))
    {
        throw std::invalid_argument("field_pair_phi: potential range must not exceed L/2 - 1");
    }
    if (p.is_zero())
    {
        return 0.0;
    }
    PeriodicView const view(omega);
    auto const kernel = euclidean_kernel(p, grid, d);
    auto const& base = view.base();
    double const reach = 2.0 * view.max_excursion() + p.range();

    double total = 0.0;
    for (auto const& x : view.images_in(Region::centered(d, L + 1.0)))
    {
        double const weight = unit_overlap(x.anchor, L, d);
        if (weight == 0.0)
        {
            continue;
        }
        double inner = 0.0;
        for (auto const& y : view.images_in(window(x.anchor, 2.0 * reach, d)))
        {
            bool const same = y.base == x.base && y.shift == x.shift;
            if (same)
            {
                inner += 0.5 * kernel.self(base[x.base]);
            }
            else
            {
                inner += 0.5 * kernel.between(base[x.base], base[y.base], sub(y.shift, x.shift));
            }
        }
        total += weight * inner;
    }
    return total;
}

double phi_truncated(std::span<Bridge const> field,
                     TruncationParams const& params,
                     PairPotential const& p,
                     TimeGrid const& grid)
{
    if (field.empty())
    {
        return 0.0;
    }
    int const d = 3;
    auto const kernel = euclidean_kernel(truncate_potential(p, params.M), grid, d);
    Region const unit = Region::centered(d, 1.0);
    Region const window_R = Region::centered(d, params.R);
    double total = 0.0;
    for (std::size_t x = 0; x < field.size(); ++x)
    {
        if (field[x].length > params.K || !unit.contains(field[x].anchor))
        {
            continue;
        }
        for (std::size_t y = 0; y < field.size(); ++y)
        {
            if (field[y].length > params.K || !window_R.contains(field[y].anchor))
            {
                continue;
            }
            total += pair_term(field[x], field[y], x == y, kernel);
        }
    }
    return total;
}

long covering_number(double R, int d)
{
    if (!(R > 1.0))
    {
        throw std::invalid_argument("covering_number: R must exceed 1");
    }
    double const side = (R - 1.0) / (2.0 * std::sqrt(static_cast<double>(d)));
    auto const per_axis = static_cast<long>(std::ceil((R + 1.0) / side - 1e-12));
    long r = 1;
    for (int a = 0; a < d; ++a)
    {
        r *= per_axis;
    }
    return r;
}

HamiltonianBoundReport check_hamiltonian_lower_bound(MarkedConfiguration const& omega,
                                                     TruncationParams const& params,
                                                     PairPotential const& p,
                                                     TimeGrid const& grid)
{
    params.validate();
    double const L = omega.box.length;
    int const d = omega.box.d;
    if (L < params.R + 2.0)
    {
        throw std::invalid_argument("check_hamiltonian_lower_bound: requires L >= R + 2");
    }
    HamiltonianBoundReport rep;
    PeriodicView const view(omega);
    auto const& base = view.base();

    rep.hamiltonian = hamiltonian(std::span<Bridge const>(base), euclidean_kernel(p, grid, d));

    auto const kernel_M = euclidean_kernel(truncate_potential(p, params.M), grid, d);
    // every image whose window w + Lambda_R can contain a shift z in Lambda
    auto const windows = view.images_in(Region::centered(d, L + params.R));
    std::vector<Point> centers;
    centers.reserve(windows.size());
    for (auto const& w : windows)
    {
        centers.push_back(w.anchor);
    }

    double field = 0.0;
    for (auto const& x : view.images_in(Region::centered(d, L + 1.0)))
    {
        if (base[x.base].length > params.K)
        {
            continue;
        }
        for (auto const& y : windows)
        {
            if (base[y.base].length > params.K || sup_distance(x.anchor, y.anchor, d) >= 0.5 * (1.0 + params.R))
            {
                continue;
            }
            std::array<Interval, 3> cell{};
            bool empty = false;
            for (int a = 0; a < 3; ++a)
            {
                if (a >= d)
                {
                    cell[a] = {0.0, 1.0};
                    continue;
                }
                cell[a].lo = std::max({-0.5 * L, x.anchor[a] - 0.5, y.anchor[a] - 0.5 * params.R});
                cell[a].hi = std::min({0.5 * L, x.anchor[a] + 0.5, y.anchor[a] + 0.5 * params.R});
                empty = empty || cell[a].width() == 0.0;
            }
            if (empty)
            {
                continue;
            }
            bool const same = y.base == x.base && y.shift == x.shift;
            double const t = same ? 0.5 * kernel_M.self(base[x.base])
                                  : 0.5 * kernel_M.between(base[x.base], base[y.base], sub(y.shift, x.shift));
            if (t == 0.0)
            {
                continue;
            }
            field += t * indicator_volume(cell, d, centers, params.R, params.S);
        }
    }
    rep.field_term = field;

    double const inner_half = 0.5 * (L - params.R - 2.0);
    for (auto const& f : base)
    {
        bool outer = false;
        for (int a = 0; a < d; ++a)
        {
            outer = outer || std::abs(f.anchor[a]) > inner_half;
        }
        rep.boundary_count += outer ? 1 : 0;
    }
    rep.r = covering_number(params.R, d);
    rep.C = std::pow(2.0, d) * grid.beta * params.M * params.K * params.K * static_cast<double>(rep.r) * params.S;
    rep.rhs = rep.field_term - rep.C * static_cast<double>(rep.boundary_count);
    rep.slack = rep.hamiltonian - rep.rhs;
    rep.holds = rep.hamiltonian >= rep.rhs - 1e-12 * std::max(std::abs(rep.hamiltonian), std::abs(rep.rhs));
    return rep;
}

EstimatorResult field_term_by_shifts(MarkedConfiguration const& omega,
                                     TruncationParams const& params,
                                     PairPotential const& p,
                                     TimeGrid const& grid,
                                     McParams const& mc)
{
    params.validate();
    PeriodicView const view(omega);
    int const d = omega.box.d;
    double const volume = omega.box.volume();
    std::vector<double> values(mc.samples);
    parallel_for(mc.samples, mc.threads, [&](std::size_t i) {
        RandomStream rng(mc.seed, {kShiftTag, i});
        Point const z = omega.box.uniform_point(rng);
        Point minus_z{};
        for (int a = 0; a < d; ++a)
        {
            minus_z[a] = -z[a];
        }
        auto const images = view.images_in(window(z, std::max(params.R, 1.0), d));
        Region const window_R = window(z, params.R, d);
        long count = 0;
        for (auto const& img : images)
        {
            count += window_R.contains(img.anchor) ? 1 : 0;
        }
        if (count > params.S)
        {
            values[i] = 0.0;
            return;
        }
        std::vector<Bridge> shifted;
        shifted.reserve(images.size());
        for (auto const& img : images)
        {
            shifted.push_back(view.materialize(img, minus_z));
        }
        values[i] = volume * phi_truncated(shifted, params, p, grid);
    });
    return summarize(values, mc.seed);
}

}  // namespace bosegas
