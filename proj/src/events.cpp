#include "gmx/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "gmx/errors.hpp"

namespace gmx {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

bool same_family(const IntervalFamily& a, const IntervalFamily& b) {
  const auto& ia = a.intervals();
  const auto& ib = b.intervals();
  if (ia.size() != ib.size()) return false;
  for (std::size_t i = 0; i < ia.size(); ++i) {
    if (ia[i].lower != ib[i].lower || ia[i].upper != ib[i].upper) return false;
  }
  return true;
}

bool covers(const IntervalFamily& f, double t) {
  for (const auto& iv : f.intervals()) {
    if (iv.lower < t && t <= iv.upper) return true;
  }
  return false;
}

bool compare_count(std::uint64_t count, CountOp op, std::uint64_t value) {
  return op == CountOp::eq ? count == value : count <= value;
}

std::optional<double> max_terms_theory(const std::vector<const MaxTerm*>& terms,
                                       const LimitLaws& laws) {
  if (terms.size() == 1) {
    const MaxTerm& t = *terms[0];
    switch (t.cls) {
      case ObsClass::observed:
        return laws.order_stats_obs_missed_cdf(t.k, 1, t.x, inf);
      case ObsClass::missed:
        return laws.order_stats_obs_missed_cdf(1, t.k, inf, t.x);
      case ObsClass::all:
        return laws.order_stats_vs_all_cdf(ObsClass::observed, 1, t.k, inf, t.x);
    }
  }
  if (terms.size() != 2) return std::nullopt;
  const MaxTerm* a = terms[0];
  const MaxTerm* b = terms[1];
  if (a->cls == ObsClass::all) std::swap(a, b);
  if (a->cls == ObsClass::missed && b->cls == ObsClass::observed) std::swap(a, b);
  if (a->cls == ObsClass::observed && b->cls == ObsClass::missed) {
    return laws.order_stats_obs_missed_cdf(a->k, b->k, a->x, b->x);
  }
  if (a->cls != ObsClass::all && b->cls == ObsClass::all) {
    return laws.order_stats_vs_all_cdf(a->cls, a->k, b->k, a->x, b->x);
  }
  return std::nullopt;
}

std::optional<double> joint_counts_theory(const std::vector<const CountTerm*>& terms,
                                          const LimitLaws& laws) {
  if (terms.size() != 2 && terms.size() != 4) return std::nullopt;
  std::vector<double> levels;
  std::map<std::pair<int, double>, std::uint64_t> value;
  for (const CountTerm* t : terms) {
    if (t->op != CountOp::eq || t->cls == ObsClass::all) return std::nullopt;
    if (!same_family(t->family, terms[0]->family)) return std::nullopt;
    if (std::find(levels.begin(), levels.end(), t->x) == levels.end()) levels.push_back(t->x);
    if (!value.emplace(std::make_pair(static_cast<int>(t->cls), t->x), t->value).second) {
      return std::nullopt;
    }
  }
  if (levels.size() * 2 != terms.size()) return std::nullopt;
  const auto at = [&](ObsClass c, double x) -> std::optional<std::uint64_t> {
    auto it = value.find({static_cast<int>(c), x});
    if (it == value.end()) return std::nullopt;
    return it->second;
  };
  const double x = levels.front();
  const double y = levels.back();
  const auto k1 = at(ObsClass::observed, x);
  const auto k2 = at(ObsClass::missed, x);
  const auto k3 = at(ObsClass::observed, y);
  const auto k4 = at(ObsClass::missed, y);
  if (!k1 || !k2 || !k3 || !k4) return std::nullopt;
  return laws.joint_counts_pmf(terms[0]->family.measure(), x, y, *k1, *k2, *k3, *k4);
}

std::optional<double> location_theory(const std::vector<const LocationTerm*>& locs,
                                      const std::vector<const MaxTerm*>& heights,
                                      const LimitLaws& laws) {
  std::optional<double> s_of[3];
  std::optional<double> x_of[3];
  for (const LocationTerm* l : locs) {
    auto& slot = s_of[static_cast<int>(l->cls)];
    if (slot) return std::nullopt;
    slot = l->s;
  }
  for (const MaxTerm* h : heights) {
    auto& slot = x_of[static_cast<int>(h->cls)];
    if (h->k != 1 || slot || !s_of[static_cast<int>(h->cls)]) return std::nullopt;
    slot = h->x;
  }
  const int obs = static_cast<int>(ObsClass::observed);
  const int mis = static_cast<int>(ObsClass::missed);
  const int all = static_cast<int>(ObsClass::all);

  LocationPair pair;
  int first;
  int second;
  if (locs.size() == 1) {
    // A lone observed or missed location pairs with a trivial constraint on
    // the other class.
    if (s_of[obs]) {
      s_of[mis] = 1.0;
    } else if (s_of[mis]) {
      s_of[obs] = 1.0;
    } else {
      return std::nullopt;
    }
  }
  if (s_of[obs] && s_of[mis]) {
    pair = LocationPair::obs_missed;
    first = obs;
    second = mis;
  } else if (s_of[obs] && s_of[all]) {
    pair = LocationPair::obs_all;
    first = obs;
    second = all;
  } else if (s_of[mis] && s_of[all]) {
    pair = LocationPair::missed_all;
    first = mis;
    second = all;
  } else {
    return std::nullopt;
  }
  const double s = *s_of[first];
  const double t = *s_of[second];
  if (!x_of[first] && !x_of[second]) {
    return locations_cdf(laws.params().lambda_law, pair, s, t);
  }
  const double x = x_of[first].value_or(inf);
  const double y = x_of[second].value_or(inf);
  if (pair != LocationPair::obs_missed && x > y) return std::nullopt;
  return laws.locations_heights_cdf(pair, s, t, x, y);
}

}  // namespace

EventEvaluator::EventEvaluator(std::vector<EventSpec> events, std::size_t n,
                               OrderStatThreshold rule)
    : events_(std::move(events)), n_(n), rule_(rule), levels_(LevelParams::make(n)) {
  count_refs_.resize(events_.size());
  for (std::size_t e = 0; e < events_.size(); ++e) {
    count_refs_[e].resize(events_[e].terms.size());
    for (std::size_t i = 0; i < events_[e].terms.size(); ++i) {
      const EventTerm& term = events_[e].terms[i];
      if (const auto* m = std::get_if<MaxTerm>(&term)) {
        if (m->k == 0) throw InvalidParameter("max term needs k >= 1");
        if (m->k == 1 && rule_ == OrderStatThreshold::at_least_k) need_summary_ = true;
      } else if (const auto* c = std::get_if<CountTerm>(&term)) {
        CountRef ref;
        auto lv = std::find(count_levels_.begin(), count_levels_.end(), c->x);
        ref.level = static_cast<std::size_t>(lv - count_levels_.begin());
        if (lv == count_levels_.end()) count_levels_.push_back(c->x);
        auto fm = std::find_if(count_families_.begin(), count_families_.end(),
                               [&](const IntervalFamily& f) { return same_family(f, c->family); });
        ref.family = static_cast<std::size_t>(fm - count_families_.begin());
        if (fm == count_families_.end()) count_families_.push_back(c->family);
        count_refs_[e][i] = ref;
      } else {
        const auto& l = std::get<LocationTerm>(term);
        if (!(l.s > 0.0 && l.s <= 1.0)) throw InvalidParameter("location s must lie in (0, 1]");
        need_summary_ = true;
      }
    }
  }
}

void EventEvaluator::evaluate(std::span<const double> path, std::span<const std::uint8_t> eps,
                              std::span<std::uint8_t> hits) const {
  if (path.size() != n_ || eps.size() != n_ || hits.size() != events_.size()) {
    throw InvalidParameter("event evaluation: size mismatch");
  }
  std::optional<MaximaSummary> summary;
  if (need_summary_) summary = summarize_maxima(path, eps);
  std::optional<ExceedanceRecord> record;
  if (!count_levels_.empty()) {
    record = exceedance_counts(path, eps, count_levels_, count_families_);
  }
  for (std::size_t e = 0; e < events_.size(); ++e) {
    bool hit = true;
    const auto& terms = events_[e].terms;
    for (std::size_t i = 0; hit && i < terms.size(); ++i) {
      const EventTerm& term = terms[i];
      if (const auto* m = std::get_if<MaxTerm>(&term)) {
        const double u = levels_.level(m->x);
        if (m->k == 1 && summary) {
          hit = summary->maximum(m->cls) <= u;
        } else {
          hit = kth_maximum(path, eps, m->cls, m->k, rule_) <= u;
        }
      } else if (const auto* c = std::get_if<CountTerm>(&term)) {
        const CountRef& ref = count_refs_[e][i];
        hit = compare_count(record->count(c->cls, ref.level, ref.family), c->op, c->value);
      } else {
        const auto& l = std::get<LocationTerm>(term);
        const auto loc = summary->location(l.cls);
        hit = loc.has_value() && *loc <= lattice_floor(n_, l.s);
      }
    }
    hits[e] = hit ? 1 : 0;
  }
}

std::optional<std::vector<VoidAtom>> void_atoms(const EventSpec& event) {
  struct Constraint {
    ObsClass cls;
    const IntervalFamily* family;
    double x;
  };
  static const IntervalFamily unit = IntervalFamily::unit();
  std::vector<Constraint> cs;
  std::vector<double> cuts{0.0, 1.0};
  for (const EventTerm& term : event.terms) {
    if (const auto* m = std::get_if<MaxTerm>(&term)) {
      if (m->k != 1) return std::nullopt;
      cs.push_back({m->cls, &unit, m->x});
    } else if (const auto* c = std::get_if<CountTerm>(&term)) {
      if (c->value != 0) return std::nullopt;
      cs.push_back({c->cls, &c->family, c->x});
      for (const auto& iv : c->family.intervals()) {
        cuts.push_back(iv.lower);
        cuts.push_back(iv.upper);
      }
    } else {
      return std::nullopt;
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<VoidAtom> atoms;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    VoidAtom atom{cuts[i], cuts[i + 1], inf, inf};
    for (const Constraint& c : cs) {
      if (!covers(*c.family, mid)) continue;
      if (c.cls != ObsClass::missed) atom.x_observed = std::min(atom.x_observed, c.x);
      if (c.cls != ObsClass::observed) atom.y_missed = std::min(atom.y_missed, c.x);
    }
    if (atom.x_observed < inf || atom.y_missed < inf) atoms.push_back(atom);
  }
  return atoms;
}

std::optional<double> limit_theory(const EventSpec& event, const LimitLaws& laws) {
  std::vector<const MaxTerm*> maxes;
  std::vector<const CountTerm*> counts;
  std::vector<const LocationTerm*> locs;
  for (const EventTerm& term : event.terms) {
    if (const auto* m = std::get_if<MaxTerm>(&term)) {
      maxes.push_back(m);
    } else if (const auto* c = std::get_if<CountTerm>(&term)) {
      counts.push_back(c);
    } else {
      locs.push_back(&std::get<LocationTerm>(term));
    }
  }
  if (!locs.empty()) {
    if (!counts.empty()) return std::nullopt;
    return location_theory(locs, maxes, laws);
  }
  if (counts.empty()) {
    if (auto v = max_terms_theory(maxes, laws)) return v;
  }
  if (maxes.empty()) {
    if (auto v = joint_counts_theory(counts, laws)) return v;
  }
  if (auto atoms = void_atoms(event)) {
    std::vector<VoidCell> cells;
    for (const VoidAtom& a : *atoms) {
      cells.push_back({a.upper - a.lower, a.x_observed, a.y_missed});
    }
    if (cells.empty()) return 1.0;
    return laws.void_probability_intervals(cells);
  }
  return std::nullopt;
}

std::optional<double> finite_n_theory(const EventSpec& event, std::size_t n, double gamma,
                                      std::span<const std::uint8_t> pattern) {
  if (pattern.size() != n || n < 3 || !(gamma < std::log(static_cast<double>(n)))) {
    return std::nullopt;
  }
  const auto atoms = void_atoms(event);
  if (!atoms) return std::nullopt;
  std::vector<FiniteNCell> cells;
  for (const VoidAtom& a : *atoms) {
    const std::size_t begin = lattice_floor(n, a.lower);
    const std::size_t end = lattice_floor(n, a.upper);
    FiniteNCell cell{0, 0, a.x_observed, a.y_missed};
    for (std::size_t j = begin; j < end; ++j) {
      if (pattern[j] != 0) {
        ++cell.n_obs;
      } else {
        ++cell.n_miss;
      }
    }
    if (cell.x == inf) cell.n_obs = 0;
    if (cell.y == inf) cell.n_miss = 0;
    if (cell.n_obs + cell.n_miss > 0) cells.push_back(cell);
  }
  if (cells.empty()) return 1.0;
  return finite_n_one_factor_prob(n, gamma, cells);
}

}  // namespace gmx
