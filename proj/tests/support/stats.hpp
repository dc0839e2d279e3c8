#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gmx::stats {

/// sup |F_n - F| for a sample against a continuous cdf. Sorts the sample.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample sup |F_n - G_m|.
double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function with the Stephens finite-sample
/// correction; ne is the effective sample size.
double ks_p_value(double d, double ne);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
};

/// Welford accumulator.
class RunningMoments {
 public:
  void add(double x);
  Moments get() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Sample correlation of paired values.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gmx::stats
