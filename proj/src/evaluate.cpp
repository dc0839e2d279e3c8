#include "gmx/evaluate.hpp"

#include <optional>
#include <sstream>

#include "gmx/errors.hpp"
#include "gmx/limit_laws.hpp"
#include "gmx/report.hpp"
#include "json_util.hpp"

namespace gmx {

using nlohmann::json;
using namespace detail;

namespace {

std::optional<LocationPair> parse_pair(const std::string& s) {
  if (s == "obs_missed") return LocationPair::obs_missed;
  if (s == "obs_all") return LocationPair::obs_all;
  if (s == "missed_all") return LocationPair::missed_all;
  return std::nullopt;
}

// Level arguments accept a number or the string "inf".
double as_level(const json& v, const std::string& where) {
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return as_number(v, where);
}

std::string arg(const char* key, double v) { return std::string(key) + "=" + format_number(v); }
std::string arg(const char* key, std::uint64_t v) {
  return std::string(key) + "=" + std::to_string(v);
}

EvaluationRow evaluate_query(const json& q, const std::string& where, double gamma,
                             const LambdaLaw& base_law) {
  const std::string law = as_string(require(q, "law", where), where + ".law");
  EvaluationRow row;
  row.law = law;
  if (q.contains("id")) row.id = as_string(q["id"], where + ".id");
  if (q.contains("gamma")) gamma = as_number(q["gamma"], where + ".gamma");
  const LambdaLaw lambda_law =
      q.contains("lambda_law") ? parse_lambda_law(q["lambda_law"], where + ".lambda_law") : base_law;
  row.gamma = gamma;
  row.lambda_law = lambda_law.describe();
  const auto num = [&](const char* k) { return as_number(require(q, k, where), where + "." + k); };
  const auto lvl = [&](const char* k) { return as_level(require(q, k, where), where + "." + k); };
  const auto uint = [&](const char* k) { return as_uint(require(q, k, where), where + "." + k); };
  const auto pair = [&]() {
    const auto p = parse_pair(as_string(require(q, "pair", where), where + ".pair"));
    if (!p) throw ConfigError(where + ".pair: must be obs_missed, obs_all or missed_all");
    return *p;
  };

  if (law == "finite_n_one_factor") {
    check_keys(q, {"law", "id", "gamma", "n", "cells"}, where);
    const std::uint64_t n = uint("n");
    std::vector<FiniteNCell> cells;
    std::string desc = arg("n", n) + ";cells=";
    for (const auto& c : require(q, "cells", where)) {
      if (!c.is_array() || c.size() != 4) throw ConfigError(where + ".cells: [n_obs, n_miss, x, y]");
      cells.push_back({as_uint(c[0], where), as_uint(c[1], where), as_level(c[2], where),
                       as_level(c[3], where)});
      desc += "[" + std::to_string(cells.back().n_obs) + " " + std::to_string(cells.back().n_miss) +
              " " + format_number(cells.back().x) + " " + format_number(cells.back().y) + "]";
    }
    row.lambda_law.clear();
    row.arguments = desc;
    row.value = finite_n_one_factor_prob(n, gamma, cells);
    return row;
  }
  if (law == "locations_cdf") {
    check_keys(q, {"law", "id", "lambda_law", "pair", "s", "t"}, where);
    const LocationPair p = pair();
    row.arguments = std::string("pair=") + to_string(p) + ";" + arg("s", num("s")) + ";" +
                    arg("t", num("t"));
    row.value = locations_cdf(lambda_law, p, num("s"), num("t"));
    return row;
  }

  const LimitLaws laws({gamma, lambda_law});
  if (law == "joint_maxima_cdf") {
    check_keys(q, {"law", "id", "gamma", "lambda_law", "x", "y"}, where);
    row.arguments = arg("x", lvl("x")) + ";" + arg("y", lvl("y"));
    row.value = laws.joint_maxima_cdf(lvl("x"), lvl("y"));
  } else if (law == "order_stats_obs_missed_cdf") {
    check_keys(q, {"law", "id", "gamma", "lambda_law", "k", "l", "x", "y"}, where);
    row.arguments = arg("k", uint("k")) + ";" + arg("l", uint("l")) + ";" + arg("x", lvl("x")) +
                    ";" + arg("y", lvl("y"));
    row.value = laws.order_stats_obs_missed_cdf(uint("k"), uint("l"), lvl("x"), lvl("y"));
  } else if (law == "order_stats_vs_all_cdf") {
    check_keys(q, {"law", "id", "gamma", "lambda_law", "class", "k", "m", "x", "y"}, where);
    const auto cls = parse_obs_class(as_string(require(q, "class", where), where + ".class"));
    if (!cls || *cls == ObsClass::all) throw ConfigError(where + ".class: must be observed or missed");
    row.arguments = std::string("class=") + to_string(*cls) + ";" + arg("k", uint("k")) + ";" +
                    arg("m", uint("m")) + ";" + arg("x", lvl("x")) + ";" + arg("y", lvl("y"));
    row.value = laws.order_stats_vs_all_cdf(*cls, uint("k"), uint("m"), lvl("x"), lvl("y"));
  } else if (law == "joint_counts_pmf") {
    check_keys(q, {"law", "id", "gamma", "lambda_law", "mB", "x", "y", "k"}, where);
    const json& k = require(q, "k", where);
    if (!k.is_array() || k.size() != 4) throw ConfigError(where + ".k: expected [k1, k2, k3, k4]");
    std::uint64_t kk[4];
    for (int i = 0; i < 4; ++i) kk[i] = as_uint(k[i], where + ".k");
    row.arguments = arg("mB", num("mB")) + ";" + arg("x", lvl("x")) + ";" + arg("y", lvl("y")) +
                    ";k=" + std::to_string(kk[0]) + " " + std::to_string(kk[1]) + " " +
                    std::to_string(kk[2]) + " " + std::to_string(kk[3]);
    row.value = laws.joint_counts_pmf(num("mB"), lvl("x"), lvl("y"), kk[0], kk[1], kk[2], kk[3]);
  } else if (law == "void_probability") {
    check_keys(q, {"law", "id", "gamma", "lambda_law", "cells"}, where);
    std::vector<VoidCell> cells;
    std::string desc = "cells=";
    for (const auto& c : require(q, "cells", where)) {
      if (!c.is_array() || c.size() != 3) throw ConfigError(where + ".cells: [w, x, y]");
      cells.push_back({as_number(c[0], where), as_level(c[1], where), as_level(c[2], where)});
      desc += "[" + format_number(cells.back().weight) + " " + format_number(cells.back().x) + " " +
              format_number(cells.back().y) + "]";
    }
    row.arguments = desc;
    row.value = laws.void_probability_intervals(cells);
  } else if (law == "locations_heights_cdf") {
    check_keys(q, {"law", "id", "gamma", "lambda_law", "pair", "s", "t", "x", "y"}, where);
    const LocationPair p = pair();
    row.arguments = std::string("pair=") + to_string(p) + ";" + arg("s", num("s")) + ";" +
                    arg("t", num("t")) + ";" + arg("x", lvl("x")) + ";" + arg("y", lvl("y"));
    row.value = laws.locations_heights_cdf(p, num("s"), num("t"), lvl("x"), lvl("y"));
  } else {
    throw ConfigError(where + ": unknown law '" + law + "'");
  }
  return row;
}

}  // namespace

EvaluationTable evaluate_table(const json& config) {
  check_keys(config, {"name", "gamma", "lambda_law", "queries", "output"}, "config");
  EvaluationTable table;
  if (config.contains("name")) table.name = as_string(config["name"], "name");
  if (config.contains("output")) {
    check_keys(config["output"], {"dir"}, "output");
    if (config["output"].contains("dir")) table.out_dir = as_string(config["output"]["dir"], "output.dir");
  }
  const double gamma = config.contains("gamma") ? as_number(config["gamma"], "gamma") : 0.0;
  const LambdaLaw law = config.contains("lambda_law")
                            ? parse_lambda_law(config["lambda_law"], "lambda_law")
                            : LambdaLaw::point(1.0);
  const json& queries = require(config, "queries", "config");
  if (!queries.is_array() || queries.empty()) throw ConfigError("queries: expected a nonempty array");
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const std::string where = "queries[" + std::to_string(i) + "]";
    EvaluationRow row;
    try {
      row = evaluate_query(queries[i], where, gamma, law);
    } catch (const InvalidParameter& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (row.id.empty()) row.id = "q" + std::to_string(i);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string evaluation_csv(const EvaluationTable& table) {
  std::ostringstream out;
  out << "id,law,gamma,lambda_law,arguments,value\n";
  for (const EvaluationRow& r : table.rows) {
    out << csv_field(r.id) << ',' << r.law << ',' << format_number(r.gamma) << ','
        << csv_field(r.lambda_law) << ',' << csv_field(r.arguments) << ','
        << format_number(r.value) << '\n';
  }
  return out.str();
}

std::string evaluation_json(const EvaluationTable& table) {
  std::ostringstream out;
  out << "{\n  \"name\": " << json(table.name).dump() << ",\n  \"rows\": [";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const EvaluationRow& r = table.rows[i];
    out << (i == 0 ? "\n" : ",\n") << "    {\"id\": " << json(r.id).dump()
        << ", \"law\": " << json(r.law).dump() << ", \"gamma\": " << format_number(r.gamma)
        << ", \"lambda_law\": " << json(r.lambda_law).dump()
        << ", \"arguments\": " << json(r.arguments).dump()
        << ", \"value\": " << format_number(r.value) << "}";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

}  // namespace gmx
