#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gmx/extremes.hpp"
#include "gmx/limit_laws.hpp"
#include "gmx/rng.hpp"

namespace gmx {

/// Realized mixing variables (lambda, xi) of the limiting Cox process.
struct MixingDraw {
  double lambda = 0.0;
  double xi = 0.0;
};

/// Class maxima of the limiting marked process with their locations in
/// (0, 1]. A class with zero intensity has maximum minus infinity and no
/// location.
struct LimitMaxima {
  ExtendedReal observed;
  ExtendedReal missed;
  ExtendedReal overall;
  std::optional<double> observed_location;
  std::optional<double> missed_location;
  std::optional<double> overall_location;
};

/// One draw of the limiting objects given (lambda, xi).
struct LimitSample {
  double lambda = 0.0;
  double xi = 0.0;
  /// Counts at levels[i], ascending levels, both classes.
  std::vector<double> levels;
  std::vector<std::uint64_t> observed_counts;
  std::vector<std::uint64_t> missed_counts;
  std::optional<LimitMaxima> maxima;
};

MixingDraw draw_mixing(const LimitLawParams& params, Stream& stream);

/// Counts on a set of measure mB at strictly increasing levels. The base
/// counts at the lowest level are Poisson(lambda mB g(x_min, xi)) and
/// Poisson((1 - lambda) mB g(x_min, xi)); each higher level keeps every
/// point of the previous one independently with probability
/// exp(-(x_next - x_prev)). Throws InvalidParameter for unsorted levels or
/// mB outside [0, 1].
LimitSample sample_limit_counts(const LimitLawParams& params, double mB,
                                std::span<const double> levels, Stream& stream);
LimitSample sample_limit_counts_given(const MixingDraw& mixing, double gamma, double mB,
                                      std::span<const double> levels, Stream& stream);

/// Class maxima heights (Gumbel, shifted by ln lambda - gamma + sqrt(2 gamma) xi)
/// with independent Uniform(0, 1] locations.
LimitSample sample_limit_maxima_locations(const LimitLawParams& params, Stream& stream);
LimitMaxima sample_limit_maxima_given(const MixingDraw& mixing, double gamma, Stream& stream);

}  // namespace gmx
