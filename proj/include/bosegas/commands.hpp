#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bosegas/run_config.hpp"

namespace bosegas {

/// CSV with a header row, comma separators, LF line ends and floats at 17 significant digits.
class CsvWriter
{
  public:
    using Cell = std::variant<std::string, double, long long>;

    CsvWriter(std::ostream& out, std::vector<std::string> header);

    void row(std::vector<Cell> const& cells);
    std::size_t rows() const { return rows_; }

    static std::string format(double value);

  private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

std::vector<std::string> const& subcommands();

/*!
 * Runs one subcommand. CSV goes to `csv`; `summary` receives the config,
 * seed, row count and any failure records. Returns the process exit code:
 * 0 on success, 1 when a check fails, 2 on estimator failures.
 */
int run_command(RunConfig const& config, std::ostream& csv, nlohmann::json& summary);

}  // namespace bosegas
