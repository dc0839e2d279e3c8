#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gmx/extremes.hpp"
#include "gmx/limit_laws.hpp"
#include "gmx/missingness.hpp"

namespace gmx {

/// k-th maximum of a class is <= u_n(x).
struct MaxTerm {
  ObsClass cls = ObsClass::observed;
  std::size_t k = 1;
  double x = 0.0;
};

enum class CountOp { eq, le };

/// Exceedance count of u_n(x) by a class over a family satisfies op value.
struct CountTerm {
  ObsClass cls = ObsClass::observed;
  IntervalFamily family = IntervalFamily::unit();
  double x = 0.0;
  CountOp op = CountOp::eq;
  std::uint64_t value = 0;
};

/// Location of the class maximum, scaled by n, is <= s.
struct LocationTerm {
  ObsClass cls = ObsClass::observed;
  double s = 1.0;
};

using EventTerm = std::variant<MaxTerm, CountTerm, LocationTerm>;

/// A conjunction of threshold terms.
struct EventSpec {
  std::string id;
  std::vector<EventTerm> terms;
};

/// Per-replication evaluator for a fixed list of events at path length n.
/// Holds only immutable data; evaluate() is reentrant.
class EventEvaluator {
 public:
  EventEvaluator(std::vector<EventSpec> events, std::size_t n, OrderStatThreshold rule);

  std::size_t size() const noexcept { return events_.size(); }
  const std::vector<EventSpec>& events() const noexcept { return events_; }

  /// Writes one 0/1 outcome per event into hits.
  void evaluate(std::span<const double> path, std::span<const std::uint8_t> eps,
                std::span<std::uint8_t> hits) const;

 private:
  struct CountRef {
    std::size_t level = 0;
    std::size_t family = 0;
  };

  std::vector<EventSpec> events_;
  std::size_t n_;
  OrderStatThreshold rule_;
  LevelParams levels_;
  bool need_summary_ = false;
  std::vector<double> count_levels_;
  std::vector<IntervalFamily> count_families_;
  // Parallel to events_[e].terms; only CountTerm entries are meaningful.
  std::vector<std::vector<CountRef>> count_refs_;
};

/// Limit-law value of an event when its terms match one of the closed
/// forms; empty otherwise.
std::optional<double> limit_theory(const EventSpec& event, const LimitLaws& laws);

/// Exact finite-n value for events made only of void-type terms (k = 1
/// maxima and zero counts) under the one-factor (or iid) model with a fixed
/// indicator pattern; empty otherwise.
std::optional<double> finite_n_theory(const EventSpec& event, std::size_t n, double gamma,
                                      std::span<const std::uint8_t> pattern);

/// Product-form cells of a void-type event: the atoms of (0, 1] cut by all
/// term endpoints, each with the lowest observed and missed level that must
/// not be exceeded there. Empty when the event has a non-void term.
struct VoidAtom {
  double lower = 0.0;
  double upper = 0.0;
  double x_observed = 0.0;
  double y_missed = 0.0;
};
std::optional<std::vector<VoidAtom>> void_atoms(const EventSpec& event);

}  // namespace gmx
