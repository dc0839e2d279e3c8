#include "json_util.hpp"

#include <algorithm>
#include <variant>

#include "gmx/errors.hpp"

namespace gmx::detail {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    throw ConfigError(where + ": expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_number(e, where));
  return out;
}

LambdaLaw parse_lambda_law(const json& j, const std::string& where) {
  const std::string kind = as_string(require(j, "kind", where), where + ".kind");
  if (kind == "point") {
    check_keys(j, {"kind", "p"}, where);
    return LambdaLaw::point(as_number(require(j, "p", where), where + ".p"));
  }
  if (kind == "discrete") {
    check_keys(j, {"kind", "values", "weights"}, where);
    return LambdaLaw::discrete(as_numbers(require(j, "values", where), where + ".values"),
                               as_numbers(require(j, "weights", where), where + ".weights"));
  }
  if (kind == "uniform") {
    check_keys(j, {"kind", "a", "b"}, where);
    return LambdaLaw::uniform(as_number(require(j, "a", where), where + ".a"),
                              as_number(require(j, "b", where), where + ".b"));
  }
  if (kind == "beta") {
    check_keys(j, {"kind", "alpha", "beta"}, where);
    return LambdaLaw::beta(as_number(require(j, "alpha", where), where + ".alpha"),
                           as_number(require(j, "beta", where), where + ".beta"));
  }
  throw ConfigError(where + ": unknown lambda law '" + kind + "'");
}

json lambda_law_json(const LambdaLaw& law) {
  return std::visit(
      Overloaded{
          [](const PointMass& k) { return json{{"kind", "point"}, {"p", k.p}}; },
          [](const DiscreteLaw& k) {
            return json{{"kind", "discrete"}, {"values", k.values}, {"weights", k.weights}};
          },
          [](const UniformLaw& k) { return json{{"kind", "uniform"}, {"a", k.a}, {"b", k.b}}; },
          [](const BetaLaw& k) {
            return json{{"kind", "beta"}, {"alpha", k.alpha}, {"beta", k.beta}};
          },
      },
      law.kind());
}

}  // namespace gmx::detail
