#include "bosegas/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bosegas {

namespace {

std::string trim(std::string const& s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
    {
        return {};
    }
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(ConfigEntry const& e, std::string const& key)
{
    double v = 0.0;
    auto const* first = e.value.data();
    auto const* last = first + e.value.size();
    auto const [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
    {
        throw ConfigError(e.origin + ": '" + key + "' expects a number, got '" + e.value + "'");
    }
    return v;
}

long long to_integer(ConfigEntry const& e, std::string const& key)
{
    long long v = 0;
    auto const* first = e.value.data();
    auto const* last = first + e.value.size();
    auto const [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
    {
        throw ConfigError(e.origin + ": '" + key + "' expects an integer, got '" + e.value + "'");
    }
    return v;
}

std::vector<double> split_numbers(std::string const& text, std::string const& spec)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        ConfigEntry const e{trim(item), "potential"};
        out.push_back(to_double(e, "potential '" + spec + "'"));
    }
    return out;
}

}  // namespace

ConfigEntries read_config_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError(path + ": cannot open config file");
    }
    ConfigEntries entries;
    std::string line;
    int number = 0;
    while (std::getline(in, line))
    {
        ++number;
        auto const hash = line.find('#');
        if (hash != std::string::npos)
        {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty())
        {
            continue;
        }
        auto const origin = path + ":" + std::to_string(number);
        auto const eq = line.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError(origin + ": expected key=value");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty())
        {
            throw ConfigError(origin + ": empty key");
        }
        entries[key] = ConfigEntry{value, origin};
    }
    return entries;
}

std::vector<std::string> const& config_keys()
{
    static std::vector<std::string> const keys{"beta",    "rho",     "n",       "d",       "length",  "bc",
                                               "potential", "cap",   "ns",      "kmax",    "samples", "seed",
                                               "threads", "out",     "mode",    "via",     "configs", "trunc-r",
                                               "trunc-m", "trunc-k", "trunc-s"};
    return keys;
}

PairPotential parse_potential(std::string const& spec)
{
    auto const colon = spec.find(':');
    auto const kind = spec.substr(0, colon);
    auto const args = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
    if (kind == "zero")
    {
        return PairPotential::zero();
    }
    if (kind == "table")
    {
        return PairPotential::from_csv(args);
    }
    auto const v = split_numbers(args, spec);
    auto expect = [&](std::size_t count) {
        if (v.size() != count)
        {
            throw ConfigError("potential '" + spec + "': expected " + std::to_string(count) + " parameters");
        }
    };
    if (kind == "gaussian")
    {
        expect(2);
        return PairPotential::gaussian(v[0], v[1]);
    }
    if (kind == "step")
    {
        expect(2);
        return PairPotential::compact_step(v[0], v[1]);
    }
    if (kind == "power")
    {
        expect(3);
        return PairPotential::inverse_power(v[0], v[1], v[2]);
    }
    throw ConfigError("potential '" + spec + "': unknown family (zero, gaussian, step, power, table)");
}

RunConfig make_config(std::string const& subcommand, ConfigEntries const& entries)
{
    RunConfig c;
    c.subcommand = subcommand;
    auto const& keys = config_keys();
    for (auto const& [key, entry] : entries)
    {
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
        {
            throw ConfigError(entry.origin + ": unknown key '" + key + "'");
        }
    }
    auto get = [&entries](std::string const& key) -> ConfigEntry const* {
        auto const it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto positive = [](ConfigEntry const& e, std::string const& key, double v) {
        if (!(v > 0.0))
        {
            throw ConfigError(e.origin + ": '" + key + "' must be > 0");
        }
        return v;
    };
    auto at_least = [](ConfigEntry const& e, std::string const& key, long long v, long long lo) {
        if (v < lo)
        {
            throw ConfigError(e.origin + ": '" + key + "' must be >= " + std::to_string(lo));
        }
        return v;
    };

    if (auto const* e = get("beta"))
    {
        c.beta = positive(*e, "beta", to_double(*e, "beta"));
    }
    if (auto const* e = get("rho"))
    {
        c.rho = positive(*e, "rho", to_double(*e, "rho"));
    }
    if (auto const* e = get("n"))
    {
        c.n = static_cast<int>(at_least(*e, "n", to_integer(*e, "n"), 1));
    }
    if (auto const* e = get("d"))
    {
        auto const d = to_integer(*e, "d");
        if (d < 1 || d > 3)
        {
            throw ConfigError(e->origin + ": 'd' must be 1, 2 or 3");
        }
        c.d = static_cast<int>(d);
    }
    if (auto const* e = get("length"))
    {
        c.length = positive(*e, "length", to_double(*e, "length"));
    }
    if (auto const* e = get("bc"))
    {
        try
        {
            c.bc = parse_boundary_condition(e->value);
        }
        catch (std::exception const& ex)
        {
            throw ConfigError(e->origin + ": " + ex.what());
        }
    }
    if (auto const* e = get("potential"))
    {
        c.potential = e->value;
    }
    if (auto const* e = get("cap"))
    {
        c.cap = positive(*e, "cap", to_double(*e, "cap"));
    }
    if (auto const* e = get("ns"))
    {
        c.ns = static_cast<int>(at_least(*e, "ns", to_integer(*e, "ns"), 2));
    }
    if (auto const* e = get("kmax"))
    {
        c.kmax = static_cast<int>(at_least(*e, "kmax", to_integer(*e, "kmax"), 1));
    }
    if (auto const* e = get("samples"))
    {
        c.samples = static_cast<std::size_t>(at_least(*e, "samples", to_integer(*e, "samples"), 2));
    }
    if (auto const* e = get("seed"))
    {
        c.seed = static_cast<std::uint64_t>(at_least(*e, "seed", to_integer(*e, "seed"), 0));
    }
    if (auto const* e = get("threads"))
    {
        c.threads = static_cast<int>(at_least(*e, "threads", to_integer(*e, "threads"), 1));
    }
    if (auto const* e = get("out"))
    {
        c.out = e->value;
    }
    if (auto const* e = get("mode"))
    {
        if (e->value != "le" && e->value != "eq")
        {
            throw ConfigError(e->origin + ": 'mode' must be le or eq");
        }
        c.mode = e->value;
    }
    if (auto const* e = get("via"))
    {
        if (e->value != "closed" && e->value != "variational")
        {
            throw ConfigError(e->origin + ": 'via' must be closed or variational");
        }
        c.via = e->value;
    }
    if (auto const* e = get("configs"))
    {
        c.configs = static_cast<int>(at_least(*e, "configs", to_integer(*e, "configs"), 1));
    }
    if (auto const* e = get("trunc-r"))
    {
        c.trunc.R = to_double(*e, "trunc-r");
    }
    if (auto const* e = get("trunc-m"))
    {
        c.trunc.M = to_double(*e, "trunc-m");
    }
    if (auto const* e = get("trunc-k"))
    {
        c.trunc.K = static_cast<int>(to_integer(*e, "trunc-k"));
    }
    if (auto const* e = get("trunc-s"))
    {
        c.trunc.S = static_cast<int>(to_integer(*e, "trunc-s"));
    }

    if (c.length && c.rho && c.n)
    {
        auto const* e = get("length");
        throw ConfigError(e->origin + ": the box is over-determined (give either length or rho with n)");
    }
    try
    {
        c.make_potential();
    }
    catch (ConfigError const&)
    {
        throw;
    }
    catch (std::exception const& ex)
    {
        auto const* e = get("potential");
        throw ConfigError((e ? e->origin : std::string("potential")) + ": " + ex.what());
    }
    return c;
}

bool RunConfig::has_box() const
{
    return length.has_value() || (rho.has_value() && n.has_value());
}

BoxSpec RunConfig::box() const
{
    if (length)
    {
        return BoxSpec(d, *length, bc);
    }
    if (rho && n)
    {
        return BoxSpec(d, std::pow(*n / *rho, 1.0 / d), bc);
    }
    throw ConfigError(subcommand + ": the box needs --length or both --rho and --n");
}

double RunConfig::density() const
{
    if (rho)
    {
        return *rho;
    }
    if (n && length)
    {
        return *n / box().volume();
    }
    throw ConfigError(subcommand + ": needs --rho (or --n with --length)");
}

int RunConfig::particles() const
{
    if (!n)
    {
        throw ConfigError(subcommand + ": needs --n");
    }
    return *n;
}

PairPotential RunConfig::make_potential() const
{
    auto p = parse_potential(potential);
    if (cap)
    {
        p = truncate_potential(p, *cap);
    }
    return p;
}

nlohmann::json RunConfig::to_json() const
{
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["beta"] = beta;
    j["rho"] = rho ? nlohmann::json(*rho) : nlohmann::json(nullptr);
    j["n"] = n ? nlohmann::json(*n) : nlohmann::json(nullptr);
    j["d"] = d;
    j["length"] = has_box() ? nlohmann::json(box().length) : nlohmann::json(nullptr);
    j["bc"] = to_string(bc);
    j["potential"] = potential;
    j["cap"] = cap ? nlohmann::json(*cap) : nlohmann::json(nullptr);
    j["ns"] = ns;
    j["kmax"] = kmax;
    j["samples"] = samples;
    j["seed"] = seed;
    j["mode"] = mode;
    j["via"] = via;
    j["configs"] = configs;
    j["trunc"] = {{"R", trunc.R}, {"M", trunc.M}, {"K", trunc.K}, {"S", trunc.S}};
    return j;
}

}  // namespace bosegas
