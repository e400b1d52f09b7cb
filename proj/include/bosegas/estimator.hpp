#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace bosegas {

/// Mean with standard error. Analytic/DP values are flagged exact with stderr 0.
struct EstimatorResult
{
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool exact = false;

    static EstimatorResult exact_value(double value)
    {
        return EstimatorResult{value, 0.0, 0, 0, true};
    }
};

struct McParams
{
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Cap on Dirichlet rejection attempts for one bridge.
    std::size_t max_attempts = 1000000;
};

/// Thrown when rejection sampling exhausts its attempt budget.
class SamplingFailure : public std::runtime_error
{
  public:
    SamplingFailure(std::string const& what, double acceptance_estimate)
        : std::runtime_error(what), acceptance_(acceptance_estimate)
    {
    }
    double acceptance_estimate() const { return acceptance_; }

  private:
    double acceptance_;
};

/// Sample mean and standard error of the mean, summed in index order.
EstimatorResult summarize(std::span<double const> values, std::uint64_t seed);

/// |a - b| / sqrt(se_a^2 + se_b^2); 0 when the means agree to 1e-12 relative.
double z_score(EstimatorResult const& a, EstimatorResult const& b);

}  // namespace bosegas
