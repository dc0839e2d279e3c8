#include "gmx/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gmx/errors.hpp"

namespace gmx {

LevelParams LevelParams::make(std::size_t n) {
  if (n < 3) throw InvalidParameter("normalizing levels require n >= 3");
  const double log_n = std::log(static_cast<double>(n));
  LevelParams p;
  p.n = n;
  p.a_n = std::sqrt(2.0 * log_n);
  p.b_n = p.a_n - (std::log(log_n) + std::log(4.0 * std::numbers::pi)) / (2.0 * p.a_n);
  return p;
}

double level(std::size_t n, double x) { return LevelParams::make(n).level(x); }

double transformed_level(std::size_t n, double x, double z, double gamma) {
  const LevelParams p = LevelParams::make(n);
  const double log_n = std::log(static_cast<double>(n));
  if (!(gamma >= 0.0) || gamma >= log_n) {
    throw InvalidParameter("transformed level requires 0 <= gamma < ln n");
  }
  const double rho = gamma / log_n;
  return (p.level(x) - std::sqrt(rho) * z) / std::sqrt(1.0 - rho);
}

std::size_t lattice_floor(std::size_t n, double c) {
  const double v = static_cast<double>(n) * c;
  return static_cast<std::size_t>(std::floor(v + 1e-12 * std::max(1.0, v)));
}

IntervalFamily::IntervalFamily(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw InvalidParameter("interval family must be nonempty");
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.lower < b.lower; });
  double prev_upper = 0.0;
  for (const Interval& iv : intervals_) {
    if (!(iv.lower >= 0.0 && iv.lower < iv.upper && iv.upper <= 1.0)) {
      throw InvalidParameter("intervals must satisfy 0 <= c < d <= 1");
    }
    if (iv.lower < prev_upper) throw InvalidParameter("intervals must be pairwise disjoint");
    prev_upper = iv.upper;
    measure_ += iv.upper - iv.lower;
  }
}

std::pair<std::size_t, std::size_t> IntervalFamily::index_range(std::size_t n, std::size_t i) const {
  const Interval& iv = intervals_.at(i);
  const std::size_t begin = std::min(lattice_floor(n, iv.lower), n);
  const std::size_t end = std::min(lattice_floor(n, iv.upper), n);
  return {begin, std::max(begin, end)};
}

bool IntervalFamily::contains(std::size_t n, std::size_t j) const {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto [begin, end] = index_range(n, i);
    if (j > begin && j <= end) return true;
  }
  return false;
}

std::string IntervalFamily::describe() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (i > 0) os << "+";
    os << "(" << intervals_[i].lower << "," << intervals_[i].upper << "]";
  }
  return os.str();
}

const char* to_string(ObsClass c) noexcept {
  switch (c) {
    case ObsClass::observed:
      return "observed";
    case ObsClass::missed:
      return "missed";
    case ObsClass::all:
      return "all";
  }
  return "?";
}

std::optional<ObsClass> parse_obs_class(const std::string& s) {
  if (s == "observed") return ObsClass::observed;
  if (s == "missed") return ObsClass::missed;
  if (s == "all") return ObsClass::all;
  return std::nullopt;
}

ExceedanceRecord::ExceedanceRecord(std::size_t num_levels, std::size_t num_families)
    : levels_(num_levels),
      families_(num_families),
      n_tilde_(num_levels * num_families, 0),
      n_hat_(num_levels * num_families, 0) {}

std::uint64_t ExceedanceRecord::count(ObsClass c, std::size_t level, std::size_t family) const {
  switch (c) {
    case ObsClass::observed:
      return observed(level, family);
    case ObsClass::missed:
      return missed(level, family);
    case ObsClass::all:
      return all(level, family);
  }
  return 0;
}

ExceedanceRecord exceedance_counts(std::span<const double> path,
                                   std::span<const std::uint8_t> eps,
                                   std::span<const double> levels,
                                   std::span<const IntervalFamily> families) {
  if (path.size() != eps.size()) throw InvalidParameter("path and indicators differ in length");
  const std::size_t n = path.size();
  const LevelParams lp = LevelParams::make(n);

  const std::size_t num_levels = levels.size();
  std::vector<std::size_t> order(num_levels);
  for (std::size_t l = 0; l < num_levels; ++l) order[l] = l;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
  std::vector<double> thresholds(num_levels);
  for (std::size_t p = 0; p < num_levels; ++p) thresholds[p] = lp.level(levels[order[p]]);

  ExceedanceRecord record(num_levels, families.size());
  if (num_levels == 0) return record;

  // hist[c][p]: points exceeding exactly the p lowest thresholds.
  std::vector<std::uint64_t> hist_obs(num_levels + 1);
  std::vector<std::uint64_t> hist_miss(num_levels + 1);
  const double lowest = thresholds.front();

  for (std::size_t f = 0; f < families.size(); ++f) {
    std::fill(hist_obs.begin(), hist_obs.end(), 0);
    std::fill(hist_miss.begin(), hist_miss.end(), 0);
    const IntervalFamily& family = families[f];
    for (std::size_t i = 0; i < family.intervals().size(); ++i) {
      const auto [begin, end] = family.index_range(n, i);
      for (std::size_t j = begin; j < end; ++j) {
        const double v = path[j];
        if (!(v > lowest)) continue;
        const auto exceeded = static_cast<std::size_t>(
            std::lower_bound(thresholds.begin(), thresholds.end(), v) - thresholds.begin());
        (eps[j] != 0 ? hist_obs : hist_miss)[exceeded] += 1;
      }
    }
    // Count at sorted level p = points exceeding more than p thresholds.
    std::uint64_t acc_obs = 0;
    std::uint64_t acc_miss = 0;
    for (std::size_t p = num_levels; p-- > 0;) {
      acc_obs += hist_obs[p + 1];
      acc_miss += hist_miss[p + 1];
      record.observed_ref(order[p], f) = acc_obs;
      record.missed_ref(order[p], f) = acc_miss;
    }
  }
  return record;
}

namespace {

bool in_class(ObsClass cls, std::uint8_t e) {
  switch (cls) {
    case ObsClass::observed:
      return e != 0;
    case ObsClass::missed:
      return e == 0;
    case ObsClass::all:
      return true;
  }
  return false;
}

}  // namespace

ExtendedReal kth_maximum(std::span<const double> path, std::span<const std::uint8_t> eps,
                         ObsClass cls, std::size_t k, OrderStatThreshold rule) {
  if (path.size() != eps.size()) throw InvalidParameter("path and indicators differ in length");
  if (k == 0) throw InvalidParameter("order statistic rank k must be >= 1");
  std::vector<double> members;
  members.reserve(path.size());
  for (std::size_t j = 0; j < path.size(); ++j) {
    if (in_class(cls, eps[j])) members.push_back(path[j]);
  }
  const bool strict = rule == OrderStatThreshold::more_than_k && cls != ObsClass::all;
  if (members.size() < k || (strict && members.size() == k)) {
    return ExtendedReal::minus_infinity();
  }
  auto kth = members.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(members.begin(), kth, members.end(), std::greater<>());
  return ExtendedReal(*kth);
}

std::optional<std::size_t> max_location(std::span<const double> path,
                                        std::span<const std::uint8_t> eps, ObsClass cls) {
  if (path.size() != eps.size()) throw InvalidParameter("path and indicators differ in length");
  std::optional<std::size_t> best;
  double best_value = 0.0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    if (!in_class(cls, eps[j])) continue;
    if (!best || path[j] > best_value) {
      best = j + 1;
      best_value = path[j];
    }
  }
  return best;
}

ExtendedReal MaximaSummary::maximum(ObsClass c) const noexcept {
  switch (c) {
    case ObsClass::observed:
      return observed;
    case ObsClass::missed:
      return missed;
    case ObsClass::all:
      return all;
  }
  return all;
}

std::optional<std::size_t> MaximaSummary::location(ObsClass c) const noexcept {
  switch (c) {
    case ObsClass::observed:
      return observed_location;
    case ObsClass::missed:
      return missed_location;
    case ObsClass::all:
      return all_location;
  }
  return all_location;
}

MaximaSummary summarize_maxima(std::span<const double> path, std::span<const std::uint8_t> eps) {
  if (path.size() != eps.size()) throw InvalidParameter("path and indicators differ in length");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double best[2] = {kNegInf, kNegInf};
  std::size_t where[2] = {0, 0};
  for (std::size_t j = 0; j < path.size(); ++j) {
    const std::size_t c = eps[j] != 0 ? 1 : 0;
    if (where[c] == 0 || path[j] > best[c]) {
      best[c] = path[j];
      where[c] = j + 1;
    }
  }
  MaximaSummary s;
  if (where[1] != 0) {
    s.observed = ExtendedReal(best[1]);
    s.observed_location = where[1];
  }
  if (where[0] != 0) {
    s.missed = ExtendedReal(best[0]);
    s.missed_location = where[0];
  }
  if (s.observed_location || s.missed_location) {
    const bool observed_wins =
        s.observed_location &&
        (!s.missed_location || best[1] > best[0] ||
         (best[1] == best[0] && *s.observed_location < *s.missed_location));
    s.all = observed_wins ? s.observed : s.missed;
    s.all_location = observed_wins ? s.observed_location : s.missed_location;
  }
  return s;
}

}  // namespace gmx
