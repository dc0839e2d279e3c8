#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmx/limit_laws.hpp"

namespace gmx {

/// One empirical-vs-closed-form comparison. se is the binomial standard
/// error under the closed-form probability.
struct OracleCheck {
  std::string id;
  double empirical = 0.0;
  double theory = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct OracleSuiteOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  double sigma = 4.0;
  /// Count cells below this closed-form probability are not checked.
  double min_prob = 1e-4;
};

struct CountSetting {
  LimitLawParams params;
  double mB = 1.0;
  double x = 1.0;
  double y = 0.0;
};

struct MaximaSetting {
  LimitLawParams params;
};

/// Six settings covering gamma in {0, 0.5, 1}, point / uniform / beta
/// lambda laws and mB in {0.5, 1}, all at levels x = 1, y = 0.
std::vector<CountSetting> default_count_settings();
std::vector<MaximaSetting> default_maxima_settings();

/// Empirical joint pmf of the four limiting counts against the closed form,
/// on every cell of probability >= min_prob. setting_index selects the
/// random stream.
std::vector<OracleCheck> count_equivalence(const CountSetting& setting,
                                           std::uint64_t setting_index,
                                           const OracleSuiteOptions& options);

/// Locations-and-heights joint cdf on s, t in {0.25, 0.5, 0.75} and
/// x, y in {-1, 0, 1}, plus the location-only cdf for all three pairs.
std::vector<OracleCheck> maxima_equivalence(const MaximaSetting& setting,
                                            std::uint64_t setting_index,
                                            const OracleSuiteOptions& options);

struct OracleRun {
  OracleSuiteOptions options;
  bool counts = true;
  bool maxima = true;
  std::string out_dir = ".";
};

/// {"samples": 1000000, "min_prob": 1e-4, "sigma": 4, "master_seed": 0,
///  "suites": ["counts", "maxima"], "output": {"dir": "."}}; every key is
/// optional and unknown keys throw ConfigError.
OracleRun parse_oracle_config(const nlohmann::json& j);

/// Runs the selected suites over the default settings, one setting per
/// task on up to `workers` threads. The result order and values do not
/// depend on workers.
std::vector<OracleCheck> run_oracle_suite(const OracleRun& run, std::size_t workers);

/// Columns: check_id, empirical, theory, se, z, pass.
std::string oracle_csv(const std::vector<OracleCheck>& checks);

}  // namespace gmx
