#include "bosegas/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "bosegas/cycle_expansion.hpp"
#include "bosegas/empirical_field.hpp"
#include "bosegas/ideal_gas.hpp"
#include "bosegas/parallel.hpp"
#include "bosegas/poisson_field.hpp"
#include "bosegas/special_functions.hpp"
#include "bosegas/variational.hpp"

namespace bosegas {

namespace {

constexpr std::uint64_t kCheckTag = 0x63686b63ULL;

using Cell = CsvWriter::Cell;

McParams mc_of(RunConfig const& c)
{
    McParams mc;
    mc.samples = c.samples;
    mc.seed = c.seed;
    mc.threads = c.threads;
    return mc;
}

long long as_int(bool b)
{
    return b ? 1 : 0;
}

int cmd_ideal(RunConfig const& c, std::ostream& out, nlohmann::json&)
{
    CsvWriter csv(out, {"beta", "rho", "d", "via", "phase", "alpha", "f", "f_stderr", "condensate_fraction", "rho_c"});
    double const rho = c.density();
    auto const sol = c.via == "closed" ? free_energy_ideal(c.beta, rho, c.d) : minimize_J(c.beta, rho, c.d, c.kmax);
    csv.row({c.beta,
             rho,
             static_cast<long long>(c.d),
             c.via,
             std::string(to_string(sol.phase)),
             sol.alpha,
             sol.f,
             0.0,
             sol.condensate_fraction,
             sol.rho_c});
    return 0;
}

int cmd_weights(RunConfig const& c, std::ostream& out, nlohmann::json& summary)
{
    double const L = c.bc == BoundaryCondition::empty ? 0.0 : c.box().length;
    auto const w = length_weights(c.beta, c.d, c.bc, L, c.kmax, mc_of(c), c.ns);
    CsvWriter csv(out, {"k", "q", "q_stderr"});
    for (int k = 1; k <= w.k_max(); ++k)
    {
        csv.row({static_cast<long long>(k), w[k], w.q_stderr[static_cast<std::size_t>(k - 1)]});
    }
    summary["q_bar"] = w.q_bar;
    summary["q_bar_stderr"] = w.q_bar_stderr;
    return 0;
}

int cmd_partition(RunConfig const& c, std::ostream& out, nlohmann::json& summary, std::string const& route)
{
    auto const box = c.box();
    auto const p = c.make_potential();
    TimeGrid const grid(c.beta, c.ns);
    int const n = c.particles();
    CsvWriter csv(out, {"n", "route", "mean", "stderr", "samples", "exact"});
    try
    {
        EstimatorResult r;
        if (route == "cycle")
        {
            r = Z_cycle(n, box, p, grid, mc_of(c));
        }
        else if (route == "permutation")
        {
            r = Z_bruteforce_perm(n, box, p, grid, mc_of(c));
        }
        else
        {
            r = estimate_Z_poisson(n, box, p, grid, cycle_weights(box, c.beta, n), mc_of(c));
        }
        csv.row({static_cast<long long>(n), route, r.mean, r.stderr_, static_cast<long long>(r.samples),
                 as_int(r.exact)});
    }
    catch (SamplingFailure const& e)
    {
        double const nan = std::numeric_limits<double>::quiet_NaN();
        csv.row({static_cast<long long>(n), route, nan, nan, 0LL, 0LL});
        summary["failures"].push_back({{"n", n}, {"route", route}, {"error", e.what()},
                                       {"acceptance_estimate", e.acceptance_estimate()}});
        return 2;
    }
    return 0;
}

struct QuotientRow
{
    int n;
    EstimatorResult z;
    EstimatorResult z_next;
    double ratio;
    double ratio_stderr;
    double bound;
    bool pass;
};

std::vector<QuotientRow> quotient_rows(RunConfig const& c)
{
    auto const box = c.box();
    auto const p = c.make_potential();
    TimeGrid const grid(c.beta, c.ns);
    int const n = c.particles();
    auto const weights = cycle_weights(box, c.beta, n + 1);
    std::vector<EstimatorResult> z;
    for (int m = 1; m <= n + 1; ++m)
    {
        z.push_back(estimate_Z_poisson(m, box, p, grid, weights, mc_of(c)));
    }
    std::vector<QuotientRow> rows;
    for (int m = 1; m <= n; ++m)
    {
        auto const& a = z[static_cast<std::size_t>(m - 1)];
        auto const& b = z[static_cast<std::size_t>(m)];
        QuotientRow r{m, a, b, b.mean / a.mean, 0.0, quotient_lower_bound(m, box, c.beta, p), false};
        // delta method; the shared streams make the covariance positive, so this overstates the error
        r.ratio_stderr = std::abs(r.ratio) * std::hypot(a.stderr_ / a.mean, b.stderr_ / b.mean);
        r.pass = r.ratio >= r.bound - 3.0 * r.ratio_stderr;
        rows.push_back(r);
    }
    return rows;
}

int cmd_quotient(RunConfig const& c, std::ostream& out, nlohmann::json&)
{
    CsvWriter csv(out,
                  {"n", "z_n", "z_n_stderr", "z_n1", "z_n1_stderr", "ratio", "ratio_stderr", "bound", "pass"});
    bool ok = true;
    for (auto const& r : quotient_rows(c))
    {
        csv.row({static_cast<long long>(r.n), r.z.mean, r.z.stderr_, r.z_next.mean, r.z_next.stderr_, r.ratio,
                 r.ratio_stderr, r.bound, as_int(r.pass)});
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

int cmd_bounds(RunConfig const& c, std::ostream& out, nlohmann::json& summary)
{
    auto const p = c.make_potential();
    double const rho = c.density();
    CsvWriter csv(out, {"check", "n", "value", "stderr", "reference", "pass"});
    double const nan = std::numeric_limits<double>::quiet_NaN();
    bool ok = true;

    auto const domain = in_domain_Dv(c.beta, rho, p, c.d);
    csv.row({std::string("in_domain_Dv"), 0LL, domain.thermal, 0.0, domain.threshold, as_int(domain.inside)});
    summary["domain"] = domain.diagnostic;

    double const upper = free_energy_upper_bound(c.beta, rho, p, c.d);
    if (p.is_zero())
    {
        double const f = free_energy_ideal(c.beta, rho, c.d).f;
        bool const pass = f <= upper;
        ok = ok && pass;
        csv.row({std::string("free_energy_upper_bound"), 0LL, upper, 0.0, f, as_int(pass)});
    }
    else
    {
        csv.row({std::string("free_energy_upper_bound"), 0LL, upper, 0.0, nan, 1LL});
    }

    if (c.has_box() && c.n)
    {
        for (auto const& r : quotient_rows(c))
        {
            csv.row({std::string("quotient"), static_cast<long long>(r.n), r.ratio, r.ratio_stderr, r.bound,
                     as_int(r.pass)});
            ok = ok && r.pass;
        }
        auto const mono = check_monotonicity(c.particles(), c.box(), p, TimeGrid(c.beta, c.ns), mc_of(c));
        summary["monotonicity"] = mono.diagnostic;
        for (std::size_t i = 0; i < mono.z.size(); ++i)
        {
            bool const pass = i == 0 || mono.step_ok[i - 1];
            csv.row({std::string("monotonicity"), static_cast<long long>(i + 1), mono.z[i].mean, mono.z[i].stderr_,
                     nan, as_int(pass)});
        }
        ok = ok && (!mono.asserted || mono.pass);
    }
    return ok ? 0 : 1;
}

int cmd_chi(RunConfig const& c, std::ostream& out, nlohmann::json& summary)
{
    ChiOptions opt;
    opt.k_max = c.kmax;
    opt.mc = mc_of(c);
    auto const res = optimize_chi_restricted(c.beta, c.density(), c.make_potential(), TimeGrid(c.beta, c.ns), c.d,
                                             parse_chi_mode(c.mode), opt);
    CsvWriter csv(out,
                  {"beta", "rho", "mode", "value", "value_stderr", "f_upper", "f_upper_stderr", "mass", "multiplier",
                   "tail_q", "tail_mass", "converged"});
    csv.row({c.beta, c.density(), c.mode, res.value, res.value_stderr, res.f_upper, res.value_stderr / c.beta,
             res.mass, res.multiplier, res.tail_q, res.tail_mass, as_int(res.converged)});
    summary["label"] = "upper bound on chi over Poisson candidates";
    summary["a"] = res.a;
    return res.converged ? 0 : 1;
}

struct CheckRecord
{
    FieldPairLength length;
    bool length_ok = true;
    double hamiltonian = 0.0;
    double phi = 0.0;
    HamiltonianBoundReport lower;
    std::string error;
};

int cmd_check(RunConfig const& c, std::ostream& out, nlohmann::json& summary)
{
    BoxSpec const box(c.d, c.box().length, BoundaryCondition::empty);
    auto const p = c.make_potential();
    TimeGrid const grid(c.beta, c.ns);
    auto const weights = length_weights(c.beta, c.d, BoundaryCondition::empty, 0.0, c.kmax);
    auto const configs = static_cast<std::size_t>(c.configs);

    std::vector<CheckRecord> records(configs);
    parallel_for(configs, c.threads, [&](std::size_t i) {
        auto& rec = records[i];
        try
        {
            RandomStream rng(c.seed, {kCheckTag, i});
            auto const omega = sample_marked_poisson(box, weights, grid, rng);
            try
            {
                rec.length = field_pair_length(omega);
            }
            catch (std::logic_error const&)
            {
                rec.length_ok = false;
            }
            rec.hamiltonian = hamiltonian(omega, p, grid);
            rec.phi = field_pair_phi(omega, p, grid);
            rec.lower = check_hamiltonian_lower_bound(omega, c.trunc, p, grid);
        }
        catch (std::exception const& e)
        {
            rec.error = e.what();
        }
    });

    CsvWriter csv(out, {"config", "lemma", "lhs", "rhs", "stderr", "pass"});
    bool ok = true;
    for (std::size_t i = 0; i < configs; ++i)
    {
        auto const& rec = records[i];
        auto const id = static_cast<long long>(i);
        if (!rec.error.empty())
        {
            summary["failures"].push_back({{"config", i}, {"error", rec.error}});
            ok = false;
            continue;
        }
        bool const upper_ok = rec.hamiltonian <= rec.phi * (1.0 + 1e-12) + 1e-12;
        csv.row({id, std::string("total_mark_length"), rec.length.via_overlaps, rec.length.via_count, 0.0,
                 as_int(rec.length_ok)});
        csv.row({id, std::string("hamiltonian_upper"), rec.hamiltonian, rec.phi, 0.0, as_int(upper_ok)});
        csv.row({id, std::string("hamiltonian_lower"), rec.lower.hamiltonian, rec.lower.rhs, 0.0,
                 as_int(rec.lower.holds)});
        bool const all = rec.length_ok && upper_ok && rec.lower.holds;
        summary["configurations"].push_back({{"config", i}, {"pass", all}});
        ok = ok && all;
    }
    return ok ? 0 : 1;
}

struct SelfCheck
{
    std::string name;
    std::function<double()> value;
    double expected;
    double tolerance;
};

int cmd_selftest(RunConfig const& c, std::ostream& out, nlohmann::json& summary)
{
    double const th = thermal_density(1.0, 3);
    auto const none = PairPotential::zero();
    TimeGrid const grid(1.0, c.ns);
    std::vector<SelfCheck> checks{
        {"partitions_of_1", [] { return static_cast<double>(count_partitions(1)); }, 1.0, 0.0},
        {"class_size_identity",
         [] {
             IntegerPartition id{3, {3, 0, 0}};
             return static_cast<double>(class_size(id));
         },
         1.0,
         0.0},
        {"class_sizes_sum_to_factorial",
         [] {
             double sum = 0.0;
             for (auto const& l : integer_partitions(6))
             {
                 sum += static_cast<double>(class_size(l));
             }
             return sum;
         },
         720.0,
         0.0},
        {"polylog_at_zero", [] { return polylog(2.5, 0.0); }, 0.0, 0.0},
        {"q1_equals_thermal_density",
         [] { return length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 1)[1]; },
         th,
         1e-15},
        {"empty_field_length",
         [] {
             MarkedConfiguration omega;
             omega.box = BoxSpec(3, 2.0, BoundaryCondition::empty);
             return field_pair_length(omega).via_overlaps;
         },
         0.0,
         0.0},
        {"centered_particle_field_length",
         [&] {
             MarkedConfiguration omega;
             omega.box = BoxSpec(3, 2.0, BoundaryCondition::empty);
             RandomStream rng(c.seed, {1});
             omega.particles.push_back(sample_bridge(Point{}, 3, grid, omega.box, rng));
             return field_pair_length(omega).via_overlaps;
         },
         0.375,
         1e-15},
        {"phi_truncated_all_filtered",
         [&] {
             RandomStream rng(c.seed, {2});
             BoxSpec const free(3, 4.0, BoundaryCondition::empty);
             std::vector<Bridge> field{sample_bridge(Point{}, 3, grid, free, rng),
                                       sample_bridge(Point{0.2, 0, 0}, 2, grid, free, rng)};
             TruncationParams t;
             t.K = 1;
             return phi_truncated(field, t, PairPotential::compact_step(1.0, 1.0), grid);
         },
         0.0,
         0.0},
        {"upper_bound_at_thermal_density", [&] { return free_energy_upper_bound(1.0, th, none, 3); }, 0.0, 1e-15},
        {"Dv_boundary_inside", [&] { return in_domain_Dv(1.0, th, none, 3).inside ? 1.0 : 0.0; }, 1.0, 0.0},
        {"Dv_boundary_outside",
         [&] { return in_domain_Dv(1.0, th * (1.0 + 1e-9), none, 3).inside ? 1.0 : 0.0; },
         0.0,
         0.0},
        {"entropy_at_reference",
         [] {
             auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 16);
             return entropy_rate_poisson(w.q, w);
         },
         0.0,
         1e-15},
        {"entropy_of_empty_process",
         [] {
             auto const w = length_weights(1.0, 3, BoundaryCondition::empty, 0.0, 16);
             return entropy_rate_poisson({}, w) - w.q_bar;
         },
         0.0,
         1e-15},
        {"energy_rate_without_interaction",
         [&] { return energy_rate_poisson({0.1, 0.05}, none, grid, 3, McParams{}).total.mean; },
         0.0,
         0.0},
        {"single_particle_permutation_sum",
         [&] {
             BoxSpec const box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::empty);
             return Z_bruteforce_perm(1, box, none, grid, McParams{64, c.seed, 1, 1000}).mean;
         },
         10.0 * th,
         1e-14},
        {"quotient_bound_free_algebra",
         [&] {
             BoxSpec const box = BoxSpec::with_volume(3, 10.0, BoundaryCondition::empty);
             return quotient_lower_bound(4, box, 1.0, none) * 5.0 / 10.0;
         },
         th,
         1e-15},
        {"periodic_image_translation",
         [&] {
             MarkedConfiguration omega;
             omega.box = BoxSpec(3, 3.0, BoundaryCondition::empty);
             RandomStream rng(c.seed, {3});
             for (int i = 0; i < 5; ++i)
             {
                 omega.particles.push_back(sample_bridge(omega.box.uniform_point(rng), 1, grid, omega.box, rng));
             }
             PeriodicView const view(omega);
             Region shifted = Region::of(omega.box);
             shifted.lower[0] += 3.0;
             shifted.upper[0] += 3.0;
             auto const a = view.images_in(Region::of(omega.box));
             auto const b = view.images_in(shifted);
             double err = a.size() == b.size() ? 0.0 : 1.0;
             for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
             {
                 err += std::abs(b[i].anchor[0] - a[i].anchor[0] - 3.0) + std::abs(b[i].anchor[1] - a[i].anchor[1]);
             }
             return err;
         },
         0.0,
         1e-12},
    };

    CsvWriter csv(out, {"check", "value", "expected", "stderr", "pass"});
    bool ok = true;
    for (auto const& chk : checks)
    {
        double const v = chk.value();
        bool const pass = std::abs(v - chk.expected) <= chk.tolerance;
        csv.row({chk.name, v, chk.expected, 0.0, as_int(pass)});
        if (!pass)
        {
            summary["failures"].push_back({{"check", chk.name}, {"value", v}});
        }
        ok = ok && pass;
    }
    return ok ? 0 : 1;
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

std::string CsvWriter::format(double value)
{
    if (std::isnan(value))
    {
        return "nan";
    }
    if (std::isinf(value))
    {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto const [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    if (ec != std::errc())
    {
        throw std::runtime_error("CsvWriter: number formatting failed");
    }
    return std::string(buf, ptr);
}

void CsvWriter::row(std::vector<Cell> const& cells)
{
    if (cells.size() != columns_)
    {
        throw std::logic_error("CsvWriter: row width does not match the header");
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        out_ << (i ? "," : "");
        std::visit(
            [this](auto const& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>)
                {
                    out_ << format(v);
                }
                else
                {
                    out_ << v;
                }
            },
            cells[i]);
    }
    out_ << '\n';
    ++rows_;
}

std::vector<std::string> const& subcommands()
{
    static std::vector<std::string> const names{"ideal",    "weights", "zexact", "zperm", "zestimate",
                                                "quotient", "bounds",  "chi",    "check", "selftest"};
    return names;
}

int run_command(RunConfig const& config, std::ostream& csv, nlohmann::json& summary)
{
    summary["config"] = config.to_json();
    summary["seed"] = config.seed;
    summary["failures"] = nlohmann::json::array();
    auto const& cmd = config.subcommand;
    int status = 0;
    if (cmd == "ideal")
    {
        status = cmd_ideal(config, csv, summary);
    }
    else if (cmd == "weights")
    {
        status = cmd_weights(config, csv, summary);
    }
    else if (cmd == "zexact")
    {
        status = cmd_partition(config, csv, summary, "cycle");
    }
    else if (cmd == "zperm")
    {
        status = cmd_partition(config, csv, summary, "permutation");
    }
    else if (cmd == "zestimate")
    {
        status = cmd_partition(config, csv, summary, "poisson");
    }
    else if (cmd == "quotient")
    {
        status = cmd_quotient(config, csv, summary);
    }
    else if (cmd == "bounds")
    {
        status = cmd_bounds(config, csv, summary);
    }
    else if (cmd == "chi")
    {
        status = cmd_chi(config, csv, summary);
    }
    else if (cmd == "check")
    {
        status = cmd_check(config, csv, summary);
    }
    else if (cmd == "selftest")
    {
        status = cmd_selftest(config, csv, summary);
    }
    else
    {
        throw ConfigError("unknown subcommand '" + cmd + "'");
    }
    summary["status"] = status == 0 ? "ok" : (status == 1 ? "check failed" : "estimator failure");
    return status;
}

}  // namespace bosegas
