#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bosegas/bridges.hpp"
#include "bosegas/empirical_field.hpp"
#include "bosegas/potentials.hpp"

namespace bosegas {

/// Invalid configuration; the message names the file line or flag at fault.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// One raw setting and where it came from ("run.cfg:12" or "--beta").
struct ConfigEntry
{
    std::string value;
    std::string origin;
};

using ConfigEntries = std::map<std::string, ConfigEntry>;

/// Flat key=value file; '#' starts a comment, blank lines are ignored.
ConfigEntries read_config_file(std::string const& path);

struct RunConfig
{
    std::string subcommand;

    double beta = 1.0;
    std::optional<double> rho;
    std::optional<int> n;
    int d = 3;
    std::optional<double> length;
    BoundaryCondition bc = BoundaryCondition::empty;

    std::string potential = "zero";
    std::optional<double> cap;

    int ns = 16;
    int kmax = 64;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;

    std::string mode = "le";
    std::string via = "closed";
    int configs = 100;
    TruncationParams trunc;

    bool has_box() const;
    /// L from --length, or L_N = (N / rho)^{1/d}.
    BoxSpec box() const;
    /// rho, or N / |box|.
    double density() const;
    int particles() const;
    PairPotential make_potential() const;

    /// Every setting that determines the output (threads excluded).
    nlohmann::json to_json() const;
};

/// Known keys (also the long flag names).
std::vector<std::string> const& config_keys();

/// Validates and converts raw entries; throws ConfigError naming the origin.
RunConfig make_config(std::string const& subcommand, ConfigEntries const& entries);

/*!
 * Potential spec: "zero", "gaussian:c,sigma", "step:height,radius",
 * "power:A,h,core" or "table:path.csv".
 */
PairPotential parse_potential(std::string const& spec);

}  // namespace bosegas
