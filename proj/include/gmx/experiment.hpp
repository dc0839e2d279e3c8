#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmx/events.hpp"
#include "gmx/gaussian_sim.hpp"
#include "gmx/missingness.hpp"

namespace gmx {

struct ExperimentConfig {
  std::string name = "experiment";
  std::size_t n = 0;
  CovarianceSpec covariance;
  MissingnessModel missingness = MissingnessModel::iid_bernoulli(1.0);
  std::vector<EventSpec> events;
  std::uint64_t reps = 0;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  double sigma = 4.0;
  /// When set, rows without a finite-n value pass on |p_hat - limit| <= tol
  /// instead of the z-score against the limit.
  std::optional<double> limit_abs_tol;
  OrderStatThreshold order_stat_rule = OrderStatThreshold::at_least_k;
  std::string out_dir = ".";

  /// Canonical JSON of everything that determines the results (workers and
  /// output location excluded).
  nlohmann::json canonical() const;
  /// 16 hex digits of a 64-bit FNV-1a hash of canonical().dump().
  std::string hash() const;
};

/// Parses and validates a JSON config; unknown keys and type errors throw
/// ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

/// Throws ConfigError when the config cannot run.
void validate(const ExperimentConfig& config);

struct EstimateRecord {
  std::string event_id;
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  double p_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Binomial estimate with se = sqrt(p(1 - p) / reps) and a normal 99%
/// interval clipped to [0, 1].
EstimateRecord estimate_event_probability(std::string event_id, std::uint64_t hits,
                                          std::uint64_t reps);

struct Comparison {
  double z = 0.0;
  bool pass = false;
};

/// z = (p_hat - theory) / se; a zero se gives z = 0 on exact agreement and
/// +-inf otherwise. pass iff |z| <= sigma.
Comparison compare_estimates(const EstimateRecord& est, double theory, double sigma);

struct ComparisonRow {
  EstimateRecord estimate;
  std::optional<double> theory_limit;
  std::optional<double> theory_finite_n;
  std::optional<double> z_limit;
  std::optional<double> z_finite_n;
  /// Empty when no theoretical value applies.
  std::optional<bool> pass;
};

struct ComparisonReport {
  std::size_t n = 0;
  double gamma = 0.0;
  std::string lambda_law;
  std::string config_hash;
  nlohmann::json config;
  std::vector<ComparisonRow> rows;

  /// No row failed.
  bool all_pass() const;
};

/// Hit counts per event over config.reps replications. Replication r draws
/// its path and indicators from streams derived from (master_seed, r), so
/// the counts do not depend on the number of workers.
std::vector<std::uint64_t> simulate_hits(const ExperimentConfig& config);

/// Theoretical values for the configured events.
struct TheoryValues {
  std::vector<std::optional<double>> limit;
  std::vector<std::optional<double>> finite_n;
};
TheoryValues theory_values(const ExperimentConfig& config);

ComparisonReport build_report(const ExperimentConfig& config,
                              const std::vector<std::uint64_t>& hits,
                              const TheoryValues& theory);

/// simulate_hits + theory_values + build_report.
ComparisonReport run_experiment(const ExperimentConfig& config);

}  // namespace gmx
