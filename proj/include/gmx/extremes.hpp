#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gmx {

/// Normalizing constants a_n = (2 ln n)^{1/2},
/// b_n = a_n - (ln ln n + ln 4 pi) / (2 a_n). Requires n >= 3.
struct LevelParams {
  std::size_t n = 0;
  double a_n = 0.0;
  double b_n = 0.0;

  static LevelParams make(std::size_t n);
  /// u_n(x) = x / a_n + b_n.
  double level(double x) const noexcept { return x / a_n + b_n; }
};

double level(std::size_t n, double x);

/// u_n(x, z) = (1 - rho_n)^{-1/2} (u_n(x) - rho_n^{1/2} z), rho_n = gamma / ln n.
/// Throws InvalidParameter unless 0 <= gamma < ln n.
double transformed_level(std::size_t n, double x, double z, double gamma);

/// Half-open interval (lower, upper] inside (0, 1].
struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Finite disjoint union of half-open subintervals of (0, 1], kept sorted.
class IntervalFamily {
 public:
  /// Throws InvalidParameter unless 0 <= c_1 < d_1 <= c_2 < ... < d_k <= 1
  /// after sorting by lower endpoint.
  explicit IntervalFamily(std::vector<Interval> intervals);

  static IntervalFamily unit() { return IntervalFamily({Interval{0.0, 1.0}}); }

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  double measure() const noexcept { return measure_; }

  /// 0-based [begin, end) index range of interval i for a path of length n:
  /// 1-based index j belongs to (c, d] iff floor(n c) < j <= floor(n d).
  std::pair<std::size_t, std::size_t> index_range(std::size_t n, std::size_t i) const;
  /// Whether 1-based index j is in the family at path length n.
  bool contains(std::size_t n, std::size_t j) const;

  std::string describe() const;

 private:
  std::vector<Interval> intervals_;
  double measure_ = 0.0;
};

/// floor(n * c) with a relative guard against representation error on
/// decimal endpoints (0.29 * 100 = 28.999999999999996).
std::size_t lattice_floor(std::size_t n, double c);

/// A real number or minus infinity.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double v) : value_(v) {}
  static constexpr ExtendedReal minus_infinity() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }

  constexpr bool is_minus_infinity() const noexcept {
    return value_ == -std::numeric_limits<double>::infinity();
  }
  constexpr double value() const noexcept { return value_; }

  friend constexpr auto operator<=>(const ExtendedReal&, const ExtendedReal&) = default;
  friend constexpr bool operator<=(const ExtendedReal& a, double b) { return a.value_ <= b; }

 private:
  double value_ = -std::numeric_limits<double>::infinity();
};

enum class ObsClass { observed, missed, all };

const char* to_string(ObsClass c) noexcept;
std::optional<ObsClass> parse_obs_class(const std::string& s);

/// Existence rule for class order statistics.
enum class OrderStatThreshold {
  at_least_k,    // k-th maximum exists when the class has >= k members
  more_than_k,   // literal rule: observed needs sum eps > k, missed needs
                 // sum eps < n - k
};

/// Exceedance counts per (level, family): observed (eps = 1), missed
/// (eps = 0) and their sum.
class ExceedanceRecord {
 public:
  ExceedanceRecord(std::size_t num_levels, std::size_t num_families);

  std::size_t num_levels() const noexcept { return levels_; }
  std::size_t num_families() const noexcept { return families_; }

  std::uint64_t observed(std::size_t level, std::size_t family) const {
    return n_tilde_[level * families_ + family];
  }
  std::uint64_t missed(std::size_t level, std::size_t family) const {
    return n_hat_[level * families_ + family];
  }
  std::uint64_t all(std::size_t level, std::size_t family) const {
    return observed(level, family) + missed(level, family);
  }
  std::uint64_t count(ObsClass c, std::size_t level, std::size_t family) const;

  std::uint64_t& observed_ref(std::size_t level, std::size_t family) {
    return n_tilde_[level * families_ + family];
  }
  std::uint64_t& missed_ref(std::size_t level, std::size_t family) {
    return n_hat_[level * families_ + family];
  }

 private:
  std::size_t levels_;
  std::size_t families_;
  std::vector<std::uint64_t> n_tilde_;
  std::vector<std::uint64_t> n_hat_;
};

/// Counts exceedances of u_n(x) for every x in levels and every family, in a
/// single pass per family. Throws InvalidParameter on length mismatch or
/// n < 3.
ExceedanceRecord exceedance_counts(std::span<const double> path,
                                   std::span<const std::uint8_t> eps,
                                   std::span<const double> levels,
                                   std::span<const IntervalFamily> families);

/// k-th largest value among the class; minus infinity when it does not exist
/// under the threshold rule.
ExtendedReal kth_maximum(std::span<const double> path, std::span<const std::uint8_t> eps,
                         ObsClass cls, std::size_t k,
                         OrderStatThreshold rule = OrderStatThreshold::at_least_k);

/// Smallest 1-based index attaining the class maximum; empty for an empty
/// class.
std::optional<std::size_t> max_location(std::span<const double> path,
                                        std::span<const std::uint8_t> eps, ObsClass cls);

/// Maxima and their locations for all three classes in one pass.
struct MaximaSummary {
  ExtendedReal observed;
  ExtendedReal missed;
  ExtendedReal all;
  std::optional<std::size_t> observed_location;
  std::optional<std::size_t> missed_location;
  std::optional<std::size_t> all_location;

  ExtendedReal maximum(ObsClass c) const noexcept;
  std::optional<std::size_t> location(ObsClass c) const noexcept;
};

MaximaSummary summarize_maxima(std::span<const double> path, std::span<const std::uint8_t> eps);

}  // namespace gmx
