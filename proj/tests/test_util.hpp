#pragma once

#include <algorithm>
#include <functional>
#include <vector>

namespace test_util {

// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    ks = std::max(ks, std::max(F - i / n, (i + 1) / n - F));
  }
  return ks;
}

// Piecewise-linear CDF built from density values on a uniform grid
// (trapezoidal accumulation, renormalized to end at exactly 1).
class GridCdf {
 public:
  GridCdf(double lo, double hi, std::vector<double> density_values)
      : lo_(lo), hi_(hi), cum_(density_values.size(), 0.0) {
    const double h = (hi - lo) / (density_values.size() - 1);
    for (std::size_t i = 1; i < density_values.size(); ++i)
      cum_[i] = cum_[i - 1] + 0.5 * h * (density_values[i - 1] + density_values[i]);
    for (auto& c : cum_) c /= cum_.back();
  }

  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const double pos = (x - lo_) / (hi_ - lo_) * (cum_.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - i;
    return cum_[i] + frac * (cum_[i + 1] - cum_[i]);
  }

 private:
  double lo_, hi_;
  std::vector<double> cum_;
};

}  // namespace test_util
