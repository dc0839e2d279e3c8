#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gmx/errors.hpp"
#include "gmx/evaluate.hpp"
#include "gmx/experiment.hpp"
#include "gmx/oracle_suite.hpp"
#include "gmx/report.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_error = 2;

struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out;
  double sigma = 4.0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
};

void add_common(CLI::App* sub, CommonFlags& f, bool config_required) {
  auto* c = sub->add_option("--config", f.config, "JSON config file");
  if (config_required) c->required();
  f.seed_opt = sub->add_option("--seed", f.seed, "master seed (overrides config)");
  f.workers_opt = sub->add_option("--workers", f.workers, "worker threads")
                      ->check(CLI::PositiveNumber);
  f.out_opt = sub->add_option("--out", f.out, "output directory (overrides config)");
  f.sigma_opt = sub->add_option("--sigma", f.sigma, "pass threshold in standard errors")
                    ->capture_default_str();
}

gmx::ExperimentConfig experiment_config(const CommonFlags& f) {
  gmx::ExperimentConfig c = gmx::load_experiment_config(f.config);
  if (f.seed_opt->count() > 0) c.master_seed = f.seed;
  if (f.workers_opt->count() > 0) c.workers = f.workers;
  if (f.out_opt->count() > 0) c.out_dir = f.out;
  if (f.sigma_opt->count() > 0) c.sigma = f.sigma;
  gmx::validate(c);
  return c;
}

std::string hex_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) h = (h ^ ch) * 0x100000001b3ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void print_paths(const gmx::ReportPaths& p) {
  std::cout << "wrote " << p.csv.string() << "\nwrote " << p.json.string() << "\n";
}

int run_verify(const CommonFlags& f) {
  const gmx::ExperimentConfig c = experiment_config(f);
  const gmx::ComparisonReport report = gmx::run_experiment(c);
  for (const auto& r : report.rows) {
    const auto theory = r.theory_finite_n ? r.theory_finite_n : r.theory_limit;
    const auto z = r.z_finite_n ? r.z_finite_n : r.z_limit;
    std::cout << r.estimate.event_id << "  p_hat=" << gmx::format_number(r.estimate.p_hat)
              << "  theory=" << (theory ? gmx::format_number(*theory) : "na")
              << "  z=" << (z ? gmx::format_number(*z) : "na") << "  "
              << (r.pass ? (*r.pass ? "PASS" : "FAIL") : "NA") << "\n";
  }
  print_paths(gmx::write_report_files(report, c.out_dir, c.name, "verify"));
  return report.all_pass() ? exit_pass : exit_fail;
}

int run_simulate(const CommonFlags& f) {
  const gmx::ExperimentConfig c = experiment_config(f);
  const auto hits = gmx::simulate_hits(c);
  gmx::TheoryValues none;
  none.limit.assign(hits.size(), std::nullopt);
  none.finite_n.assign(hits.size(), std::nullopt);
  const gmx::ComparisonReport report = gmx::build_report(c, hits, none);
  for (const auto& r : report.rows) {
    std::cout << r.estimate.event_id << "  p_hat=" << gmx::format_number(r.estimate.p_hat)
              << "  se=" << gmx::format_number(r.estimate.se) << "\n";
  }
  print_paths(gmx::write_report_files(report, c.out_dir, c.name, "simulate"));
  return exit_pass;
}

int run_evaluate(const CommonFlags& f) {
  const nlohmann::json config = gmx::read_json_file(f.config);
  gmx::EvaluationTable table = gmx::evaluate_table(config);
  if (f.out_opt->count() > 0) table.out_dir = f.out;
  const std::string csv = gmx::evaluation_csv(table);
  const std::string js = gmx::evaluation_json(table);
  std::cout << csv;
  const std::string hash = hex_hash(config.dump());
  const std::filesystem::path dir(table.out_dir);
  std::filesystem::create_directories(dir);
  const std::string stem = table.name + "_evaluate_" + hash;
  gmx::write_file_once(dir / (stem + ".csv"), csv);
  gmx::write_file_once(dir / (stem + ".json"), js);
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << "\n";
  return exit_pass;
}

int run_oracle(const CommonFlags& f) {
  gmx::OracleRun run =
      gmx::parse_oracle_config(f.config.empty() ? nlohmann::json::object() : gmx::read_json_file(f.config));
  if (f.seed_opt->count() > 0) run.options.seed = f.seed;
  if (f.sigma_opt->count() > 0) run.options.sigma = f.sigma;
  if (f.out_opt->count() > 0) run.out_dir = f.out;
  const auto checks = gmx::run_oracle_suite(run, f.workers);
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (!c.pass) {
      ++failed;
      std::cout << "FAIL " << c.id << "  empirical=" << gmx::format_number(c.empirical)
                << "  theory=" << gmx::format_number(c.theory)
                << "  z=" << gmx::format_number(c.z) << "\n";
    }
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " oracle checks pass\n";
  const std::string csv = gmx::oracle_csv(checks);
  const nlohmann::json key{{"samples", run.options.samples}, {"min_prob", run.options.min_prob},
                           {"sigma", run.options.sigma}, {"master_seed", run.options.seed},
                           {"counts", run.counts}, {"maxima", run.maxima}};
  const std::filesystem::path dir(run.out_dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / ("oracle_" + hex_hash(key.dump()) + ".csv");
  gmx::write_file_once(path, csv);
  std::cout << "wrote " << path.string() << "\n";
  return failed == 0 ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maxima and exceedances of Gaussian sequences with missing data"};
  app.require_subcommand(1);
  CommonFlags verify, simulate, evaluate, oracle;
  add_common(app.add_subcommand("verify", "simulate, compare with theory, report pass/fail"),
             verify, true);
  add_common(app.add_subcommand("simulate", "Monte Carlo estimates only"), simulate, true);
  add_common(app.add_subcommand("evaluate", "tabulate closed-form limit laws"), evaluate, true);
  add_common(app.add_subcommand("oracle", "check the limit sampler against the closed forms"),
             oracle, false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_error;
  }
  try {
    if (app.got_subcommand("verify")) return run_verify(verify);
    if (app.got_subcommand("simulate")) return run_simulate(simulate);
    if (app.got_subcommand("evaluate")) return run_evaluate(evaluate);
    return run_oracle(oracle);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }
}
