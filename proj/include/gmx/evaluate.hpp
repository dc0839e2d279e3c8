#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gmx {

struct EvaluationRow {
  std::string id;
  std::string law;
  double gamma = 0.0;
  std::string lambda_law;
  std::string arguments;
  double value = 0.0;
};

struct EvaluationTable {
  std::string name = "evaluate";
  std::string out_dir = ".";
  std::vector<EvaluationRow> rows;
};

/// Evaluates a list of closed-form queries:
///   {"gamma": 1, "lambda_law": {...}, "queries": [{"law": "joint_maxima_cdf",
///    "x": 0, "y": 0.5}, ...]}
/// Each query may override gamma and lambda_law. Unknown keys throw
/// ConfigError.
EvaluationTable evaluate_table(const nlohmann::json& config);

std::string evaluation_csv(const EvaluationTable& table);
std::string evaluation_json(const EvaluationTable& table);

}  // namespace gmx
