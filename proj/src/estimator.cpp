#include "bosegas/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace bosegas {

namespace {

/// Neumaier-compensated running sum.
class CompensatedSum
{
  public:
    void add(double x)
    {
        double const t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace

EstimatorResult summarize(std::span<double const> values, std::uint64_t seed)
{
    EstimatorResult r;
    r.samples = values.size();
    r.seed = seed;
    if (values.empty())
    {
        return r;
    }
    CompensatedSum sum;
    for (double v : values)
    {
        sum.add(v);
    }
    double const n = static_cast<double>(values.size());
    r.mean = sum.value() / n;
    if (values.size() > 1)
    {
        CompensatedSum ss;
        for (double v : values)
        {
            ss.add((v - r.mean) * (v - r.mean));
        }
        r.stderr_ = std::sqrt(ss.value() / (n - 1.0) / n);
    }
    return r;
}

double z_score(EstimatorResult const& a, EstimatorResult const& b)
{
    double const diff = std::abs(a.mean - b.mean);
    if (diff <= 1e-12 * std::max(std::abs(a.mean), std::abs(b.mean)))
    {
        return 0.0;
    }
    double const se = std::hypot(a.stderr_, b.stderr_);
    if (se == 0.0)
    {
        return diff == 0.0 ? 0.0 : INFINITY;
    }
    return diff / se;
}

}  // namespace bosegas
