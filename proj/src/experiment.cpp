#include "gmx/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <set>
#include <thread>
#include <utility>

#include "gmx/errors.hpp"
#include "json_util.hpp"
#include "gmx/limit_laws.hpp"
#include "gmx/rng.hpp"

namespace gmx {

using nlohmann::json;
using namespace detail;

namespace {

// Two-sided 99% normal quantile.
constexpr double z99 = 2.5758293035489004;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

MissingnessModel parse_missingness(const json& j) {
  const std::string where = "missingness";
  const std::string kind = as_string(require(j, "kind", where), where + ".kind");
  if (kind == "periodic") {
    check_keys(j, {"kind", "pattern"}, where);
    return MissingnessModel::periodic(as_string(require(j, "pattern", where), where + ".pattern"));
  }
  check_keys(j, {"kind", "lambda_law"}, where);
  LambdaLaw law = parse_lambda_law(require(j, "lambda_law", where), where + ".lambda_law");
  if (kind == "iid_bernoulli") return MissingnessModel(IidBernoulli{std::move(law)});
  if (kind == "exchangeable") return MissingnessModel(Exchangeable{std::move(law)});
  throw ConfigError(where + ": unknown kind '" + kind + "'");
}

json missingness_json(const MissingnessModel& m) {
  return std::visit(
      Overloaded{
          [](const IidBernoulli& k) {
            return json{{"kind", "iid_bernoulli"}, {"lambda_law", lambda_law_json(k.lambda_law)}};
          },
          [](const Exchangeable& k) {
            return json{{"kind", "exchangeable"}, {"lambda_law", lambda_law_json(k.lambda_law)}};
          },
          [](const Periodic& k) {
            std::string s;
            for (auto b : k.pattern) s += static_cast<char>('0' + b);
            return json{{"kind", "periodic"}, {"pattern", s}};
          },
      },
      m.kind());
}

ObsClass parse_class(const json& v, const std::string& where) {
  const auto c = parse_obs_class(as_string(v, where));
  if (!c) throw ConfigError(where + ": class must be observed, missed or all");
  return *c;
}

EventTerm parse_term(const json& j, const std::string& where) {
  const std::string stat = as_string(require(j, "stat", where), where + ".stat");
  if (stat == "max") {
    check_keys(j, {"stat", "class", "k", "x"}, where);
    MaxTerm t;
    t.cls = parse_class(require(j, "class", where), where + ".class");
    if (j.contains("k")) t.k = as_uint(j["k"], where + ".k");
    if (t.k == 0) throw ConfigError(where + ".k: must be >= 1");
    t.x = as_number(require(j, "x", where), where + ".x");
    return t;
  }
  if (stat == "count") {
    check_keys(j, {"stat", "class", "family", "x", "op", "value"}, where);
    CountTerm t;
    t.cls = parse_class(require(j, "class", where), where + ".class");
    if (j.contains("family")) {
      const json& f = j["family"];
      if (!f.is_array() || f.empty()) throw ConfigError(where + ".family: expected [[c, d], ...]");
      std::vector<Interval> ivs;
      for (const auto& iv : f) {
        const auto ends = as_numbers(iv, where + ".family");
        if (ends.size() != 2) throw ConfigError(where + ".family: intervals are [c, d] pairs");
        ivs.push_back({ends[0], ends[1]});
      }
      try {
        t.family = IntervalFamily(std::move(ivs));
      } catch (const InvalidParameter& e) {
        throw ConfigError(where + ".family: " + e.what());
      }
    }
    t.x = as_number(require(j, "x", where), where + ".x");
    if (j.contains("op")) {
      const std::string op = as_string(j["op"], where + ".op");
      if (op == "eq") {
        t.op = CountOp::eq;
      } else if (op == "le") {
        t.op = CountOp::le;
      } else {
        throw ConfigError(where + ".op: must be eq or le");
      }
    }
    t.value = as_uint(require(j, "value", where), where + ".value");
    return t;
  }
  if (stat == "location") {
    check_keys(j, {"stat", "class", "s"}, where);
    LocationTerm t;
    t.cls = parse_class(require(j, "class", where), where + ".class");
    t.s = as_number(require(j, "s", where), where + ".s");
    if (!(t.s > 0.0 && t.s <= 1.0)) throw ConfigError(where + ".s: must lie in (0, 1]");
    return t;
  }
  throw ConfigError(where + ": unknown stat '" + stat + "'");
}

json term_json(const EventTerm& term) {
  return std::visit(
      Overloaded{
          [](const MaxTerm& t) {
            return json{{"stat", "max"}, {"class", to_string(t.cls)}, {"k", t.k}, {"x", t.x}};
          },
          [](const CountTerm& t) {
            json fam = json::array();
            for (const auto& iv : t.family.intervals()) fam.push_back({iv.lower, iv.upper});
            return json{{"stat", "count"},  {"class", to_string(t.cls)},
                        {"family", fam},    {"x", t.x},
                        {"op", t.op == CountOp::eq ? "eq" : "le"}, {"value", t.value}};
          },
          [](const LocationTerm& t) {
            return json{{"stat", "location"}, {"class", to_string(t.cls)}, {"s", t.s}};
          },
      },
      term);
}

const char* family_name(CovarianceFamily f) {
  switch (f) {
    case CovarianceFamily::iid:
      return "iid";
    case CovarianceFamily::one_factor:
      return "one_factor";
    case CovarianceFamily::log_decay:
      return "log_decay";
  }
  return "?";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

json ExperimentConfig::canonical() const {
  json model{{"family", family_name(covariance.family)}, {"n", n}, {"gamma", covariance.gamma}};
  if (covariance.family == CovarianceFamily::log_decay) {
    model["shift"] = covariance.shift;
    model["sampler"] =
        covariance.sampler == LogDecaySampler::circulant ? "circulant" : "dense_cholesky";
  }
  json targets = json::array();
  for (const EventSpec& e : events) {
    json terms = json::array();
    for (const EventTerm& t : e.terms) terms.push_back(term_json(t));
    targets.push_back({{"id", e.id}, {"terms", terms}});
  }
  json j{{"name", name},
         {"model", model},
         {"missingness", missingness_json(missingness)},
         {"targets", targets},
         {"reps", reps},
         {"master_seed", master_seed},
         {"sigma", sigma},
         {"order_stat_rule",
          order_stat_rule == OrderStatThreshold::at_least_k ? "at_least_k" : "more_than_k"}};
  if (limit_abs_tol) j["limit_abs_tol"] = *limit_abs_tol;
  return j;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical().dump())));
  return buf;
}

ExperimentConfig parse_experiment_config(const json& j) {
  check_keys(j, {"name", "model", "missingness", "targets", "reps", "master_seed", "workers",
                 "sigma", "limit_abs_tol", "order_stat_rule", "output"},
             "config");
  ExperimentConfig c;
  if (j.contains("name")) c.name = as_string(j["name"], "name");

  const json& model = require(j, "model", "config");
  check_keys(model, {"family", "n", "gamma", "shift", "sampler"}, "model");
  const std::string family = as_string(require(model, "family", "model"), "model.family");
  if (family == "iid") {
    c.covariance.family = CovarianceFamily::iid;
  } else if (family == "one_factor") {
    c.covariance.family = CovarianceFamily::one_factor;
  } else if (family == "log_decay") {
    c.covariance.family = CovarianceFamily::log_decay;
  } else {
    throw ConfigError("model.family: unknown family '" + family + "'");
  }
  c.n = as_uint(require(model, "n", "model"), "model.n");
  if (model.contains("gamma")) c.covariance.gamma = as_number(model["gamma"], "model.gamma");
  if (model.contains("shift")) c.covariance.shift = as_number(model["shift"], "model.shift");
  if (model.contains("sampler")) {
    const std::string s = as_string(model["sampler"], "model.sampler");
    if (s == "circulant") {
      c.covariance.sampler = LogDecaySampler::circulant;
    } else if (s == "dense_cholesky") {
      c.covariance.sampler = LogDecaySampler::dense_cholesky;
    } else {
      throw ConfigError("model.sampler: must be circulant or dense_cholesky");
    }
  }

  try {
    c.missingness = parse_missingness(require(j, "missingness", "config"));
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("missingness: ") + e.what());
  }

  const json& targets = require(j, "targets", "config");
  if (!targets.is_array()) throw ConfigError("targets: expected an array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = "targets[" + std::to_string(i) + "]";
    const json& t = targets[i];
    check_keys(t, {"id", "terms"}, where);
    EventSpec e;
    e.id = as_string(require(t, "id", where), where + ".id");
    const json& terms = require(t, "terms", where);
    if (!terms.is_array() || terms.empty()) throw ConfigError(where + ".terms: expected a nonempty array");
    for (std::size_t k = 0; k < terms.size(); ++k) {
      e.terms.push_back(parse_term(terms[k], where + ".terms[" + std::to_string(k) + "]"));
    }
    c.events.push_back(std::move(e));
  }

  c.reps = as_uint(require(j, "reps", "config"), "reps");
  c.master_seed = as_uint(require(j, "master_seed", "config"), "master_seed");
  if (j.contains("workers")) c.workers = as_uint(j["workers"], "workers");
  if (j.contains("sigma")) c.sigma = as_number(j["sigma"], "sigma");
  if (j.contains("limit_abs_tol")) c.limit_abs_tol = as_number(j["limit_abs_tol"], "limit_abs_tol");
  if (j.contains("order_stat_rule")) {
    const std::string r = as_string(j["order_stat_rule"], "order_stat_rule");
    if (r == "at_least_k") {
      c.order_stat_rule = OrderStatThreshold::at_least_k;
    } else if (r == "more_than_k") {
      c.order_stat_rule = OrderStatThreshold::more_than_k;
    } else {
      throw ConfigError("order_stat_rule: must be at_least_k or more_than_k");
    }
  }
  if (j.contains("output")) {
    const json& out = j["output"];
    check_keys(out, {"dir"}, "output");
    if (out.contains("dir")) c.out_dir = as_string(out["dir"], "output.dir");
  }
  validate(c);
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_json_file(path));
}

void validate(const ExperimentConfig& c) {
  if (c.reps < 1) throw ConfigError("reps must be >= 1");
  if (c.n < 3) throw ConfigError("model.n must be >= 3");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw ConfigError("sigma must be positive");
  if (c.limit_abs_tol && !(*c.limit_abs_tol >= 0.0)) {
    throw ConfigError("limit_abs_tol must be non-negative");
  }
  if (c.events.empty()) throw ConfigError("targets must list at least one event");
  std::set<std::string> ids;
  for (const EventSpec& e : c.events) {
    if (e.id.empty()) throw ConfigError("event ids must be nonempty");
    if (!ids.insert(e.id).second) throw ConfigError("duplicate event id '" + e.id + "'");
  }
  const double g = c.covariance.gamma;
  if (!std::isfinite(g) || g < 0.0) throw ConfigError("model.gamma must be finite and >= 0");
  if (c.covariance.family == CovarianceFamily::iid && g != 0.0) {
    throw ConfigError("model.gamma must be 0 for the iid family");
  }
  if (c.covariance.family == CovarianceFamily::one_factor &&
      !(g < std::log(static_cast<double>(c.n)))) {
    throw ConfigError("model.gamma must be below ln n for the one_factor family");
  }
}

EstimateRecord estimate_event_probability(std::string event_id, std::uint64_t hits,
                                          std::uint64_t reps) {
  if (reps == 0) throw InvalidParameter("estimate needs reps >= 1");
  if (hits > reps) throw InvalidParameter("hits exceed reps");
  EstimateRecord r;
  r.event_id = std::move(event_id);
  r.hits = hits;
  r.reps = reps;
  r.p_hat = static_cast<double>(hits) / static_cast<double>(reps);
  r.se = std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(reps));
  r.ci_low = std::clamp(r.p_hat - z99 * r.se, 0.0, 1.0);
  r.ci_high = std::clamp(r.p_hat + z99 * r.se, 0.0, 1.0);
  return r;
}

Comparison compare_estimates(const EstimateRecord& est, double theory, double sigma) {
  Comparison c;
  const double diff = est.p_hat - theory;
  if (est.se > 0.0) {
    c.z = diff / est.se;
  } else if (diff == 0.0) {
    c.z = 0.0;
  } else {
    c.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  // Decimal inputs put z a few ulps off its exact value (0.52 - 0.5 is not
  // 0.02), so a z sitting on the threshold is allowed that much slack.
  c.pass = std::abs(c.z) <= sigma * (1.0 + 1e-12);
  return c;
}

bool ComparisonReport::all_pass() const {
  return std::none_of(rows.begin(), rows.end(),
                      [](const ComparisonRow& r) { return r.pass.has_value() && !*r.pass; });
}

std::vector<std::uint64_t> simulate_hits(const ExperimentConfig& config) {
  validate(config);
  const GaussianModel model = GaussianModel::build(config.n, config.covariance);
  const EventEvaluator evaluator(config.events, config.n, config.order_stat_rule);
  const std::size_t num_events = evaluator.size();
  const std::uint64_t reps = config.reps;
  const std::size_t workers =
      static_cast<std::size_t>(std::min<std::uint64_t>(config.workers, reps));

  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(num_events, 0));
  std::vector<std::exception_ptr> errors(workers);
  const auto body = [&](std::size_t w) {
    try {
      const std::uint64_t begin = reps * w / workers;
      const std::uint64_t end = reps * (w + 1) / workers;
      std::vector<double> path(config.n);
      std::vector<std::uint8_t> eps(config.n);
      std::vector<std::uint8_t> hits(num_events);
      auto& acc = partial[w];
      for (std::uint64_t r = begin; r < end; ++r) {
        Stream indicators = Stream::derive(config.master_seed, r, StreamLabel::indicators);
        Stream path_stream = Stream::derive(config.master_seed, r, StreamLabel::path);
        sample_indicators_into(config.missingness, indicators, eps);
        model.sample_into(path_stream, path);
        evaluator.evaluate(path, eps, hits);
        for (std::size_t e = 0; e < num_events; ++e) acc[e] += hits[e];
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(body, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<std::uint64_t> total(num_events, 0);
  for (const auto& p : partial) {
    for (std::size_t e = 0; e < num_events; ++e) total[e] += p[e];
  }
  return total;
}

TheoryValues theory_values(const ExperimentConfig& config) {
  TheoryValues tv;
  const LimitLaws laws({config.covariance.gamma, config.missingness.limit_law()});
  std::vector<std::uint8_t> pattern;
  const bool exact = config.missingness.is_deterministic() &&
                     config.covariance.family != CovarianceFamily::log_decay;
  if (exact) {
    Stream unused(0);
    pattern.resize(config.n);
    sample_indicators_into(config.missingness, unused, pattern);
  }
  for (const EventSpec& e : config.events) {
    tv.limit.push_back(limit_theory(e, laws));
    tv.finite_n.push_back(exact ? finite_n_theory(e, config.n, config.covariance.gamma, pattern)
                                : std::nullopt);
  }
  return tv;
}

ComparisonReport build_report(const ExperimentConfig& config,
                              const std::vector<std::uint64_t>& hits,
                              const TheoryValues& theory) {
  if (hits.size() != config.events.size() || theory.limit.size() != hits.size() ||
      theory.finite_n.size() != hits.size()) {
    throw InvalidParameter("report inputs do not match the event list");
  }
  ComparisonReport report;
  report.n = config.n;
  report.gamma = config.covariance.gamma;
  report.lambda_law = config.missingness.limit_law().describe();
  report.config_hash = config.hash();
  report.config = config.canonical();
  for (std::size_t e = 0; e < hits.size(); ++e) {
    ComparisonRow row;
    row.estimate = estimate_event_probability(config.events[e].id, hits[e], config.reps);
    row.theory_limit = theory.limit[e];
    row.theory_finite_n = theory.finite_n[e];
    std::optional<Comparison> lim;
    std::optional<Comparison> fin;
    if (row.theory_limit) {
      lim = compare_estimates(row.estimate, *row.theory_limit, config.sigma);
      row.z_limit = lim->z;
    }
    if (row.theory_finite_n) {
      fin = compare_estimates(row.estimate, *row.theory_finite_n, config.sigma);
      row.z_finite_n = fin->z;
    }
    if (fin) {
      row.pass = fin->pass;
    } else if (lim && config.limit_abs_tol) {
      row.pass = std::abs(row.estimate.p_hat - *row.theory_limit) <= *config.limit_abs_tol;
    } else if (lim) {
      row.pass = lim->pass;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

ComparisonReport run_experiment(const ExperimentConfig& config) {
  const auto hits = simulate_hits(config);
  return build_report(config, hits, theory_values(config));
}

}  // namespace gmx
