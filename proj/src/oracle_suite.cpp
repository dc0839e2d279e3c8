#include "gmx/oracle_suite.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "gmx/errors.hpp"
#include "gmx/limit_oracle.hpp"
#include "gmx/report.hpp"
#include "gmx/rng.hpp"
#include "json_util.hpp"

namespace gmx {
namespace {

// Keeps count-suite and maxima-suite streams apart for equal indices.
constexpr std::uint64_t maxima_stream_offset = 1ULL << 32;

OracleCheck make_check(std::string id, std::uint64_t hits, std::uint64_t samples, double theory,
                       double sigma) {
  OracleCheck c;
  c.id = std::move(id);
  c.empirical = static_cast<double>(hits) / static_cast<double>(samples);
  c.theory = theory;
  c.se = std::sqrt(theory * (1.0 - theory) / static_cast<double>(samples));
  const double diff = c.empirical - theory;
  c.z = c.se > 0.0 ? diff / c.se : (diff == 0.0 ? 0.0 : INFINITY);
  c.pass = std::abs(c.z) <= sigma;
  return c;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string tag(const LimitLawParams& p) {
  return "gamma=" + short_num(p.gamma) + " law=" + p.lambda_law.describe();
}

}  // namespace

std::vector<CountSetting> default_count_settings() {
  const LambdaLaw point = LambdaLaw::point(0.5);
  const LambdaLaw uniform = LambdaLaw::uniform(0.0, 1.0);
  const LambdaLaw beta = LambdaLaw::beta(2.0, 2.0);
  return {
      {{0.0, point}, 1.0},   {{0.0, uniform}, 0.5}, {{0.5, beta}, 1.0},
      {{0.5, point}, 0.5},   {{1.0, uniform}, 1.0}, {{1.0, beta}, 0.5},
  };
}

std::vector<MaximaSetting> default_maxima_settings() {
  return {
      {{0.0, LambdaLaw::point(0.5)}},
      {{0.5, LambdaLaw::uniform(0.0, 1.0)}},
      {{1.0, LambdaLaw::beta(2.0, 2.0)}},
  };
}

std::vector<OracleCheck> count_equivalence(const CountSetting& setting,
                                           std::uint64_t setting_index,
                                           const OracleSuiteOptions& options) {
  Stream stream = Stream::derive(options.seed, setting_index, StreamLabel::oracle);
  const bool x_high = setting.x > setting.y;
  const std::array<double, 2> levels =
      x_high ? std::array<double, 2>{setting.y, setting.x} : std::array<double, 2>{setting.x, setting.y};
  const std::size_t ix = x_high ? 1 : 0;
  const std::size_t iy = 1 - ix;

  std::map<std::array<std::uint64_t, 4>, std::uint64_t> tally;
  for (std::uint64_t i = 0; i < options.samples; ++i) {
    const LimitSample s = sample_limit_counts(setting.params, setting.mB, levels, stream);
    ++tally[{s.observed_counts[ix], s.missed_counts[ix], s.observed_counts[iy],
             s.missed_counts[iy]}];
  }

  // A cell of probability >= min_prob appears about min_prob * samples
  // times; a quarter of that is a safe screening floor for candidates.
  const double floor_hits = 0.25 * options.min_prob * static_cast<double>(options.samples);
  const LimitLaws laws(setting.params);
  std::vector<OracleCheck> checks;
  const std::string prefix = "counts[" + tag(setting.params) +
                             " mB=" + short_num(setting.mB) + "]";
  for (const auto& [k, hits] : tally) {
    if (static_cast<double>(hits) < floor_hits) continue;
    const double p =
        laws.joint_counts_pmf(setting.mB, setting.x, setting.y, k[0], k[1], k[2], k[3]);
    if (p < options.min_prob) continue;
    checks.push_back(make_check(prefix + " k=(" + std::to_string(k[0]) + "," +
                                    std::to_string(k[1]) + "," + std::to_string(k[2]) + "," +
                                    std::to_string(k[3]) + ")",
                                hits, options.samples, p, options.sigma));
  }
  return checks;
}

std::vector<OracleCheck> maxima_equivalence(const MaximaSetting& setting,
                                            std::uint64_t setting_index,
                                            const OracleSuiteOptions& options) {
  Stream stream =
      Stream::derive(options.seed, maxima_stream_offset + setting_index, StreamLabel::oracle);
  constexpr std::array<double, 3> st{0.25, 0.5, 0.75};
  constexpr std::array<double, 3> xy{-1.0, 0.0, 1.0};

  std::array<std::uint64_t, 81> heights{};
  std::array<std::array<std::uint64_t, 9>, 3> locs{};
  for (std::uint64_t i = 0; i < options.samples; ++i) {
    const LimitSample s = sample_limit_maxima_locations(setting.params, stream);
    const LimitMaxima& m = *s.maxima;
    std::array<bool, 3> lo{}, lm{}, la{}, ho{}, hm{};
    for (std::size_t a = 0; a < 3; ++a) {
      lo[a] = m.observed_location && *m.observed_location <= st[a];
      lm[a] = m.missed_location && *m.missed_location <= st[a];
      la[a] = m.overall_location && *m.overall_location <= st[a];
      ho[a] = m.observed <= xy[a];
      hm[a] = m.missed <= xy[a];
    }
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        locs[0][a * 3 + b] += lo[a] && lm[b];
        locs[1][a * 3 + b] += lo[a] && la[b];
        locs[2][a * 3 + b] += lm[a] && la[b];
        if (!(lo[a] && lm[b])) continue;
        for (std::size_t c = 0; c < 3; ++c) {
          for (std::size_t d = 0; d < 3; ++d) {
            heights[((a * 3 + b) * 3 + c) * 3 + d] += ho[c] && hm[d];
          }
        }
      }
    }
  }

  const LimitLaws laws(setting.params);
  const std::string prefix = tag(setting.params);
  std::vector<OracleCheck> checks;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t d = 0; d < 3; ++d) {
          const double p =
              laws.locations_heights_cdf(LocationPair::obs_missed, st[a], st[b], xy[c], xy[d]);
          checks.push_back(make_check(
              "heights[" + prefix + "] s=" + short_num(st[a]) +
                  " t=" + short_num(st[b]) + " x=" + short_num(xy[c]) +
                  " y=" + short_num(xy[d]),
              heights[((a * 3 + b) * 3 + c) * 3 + d], options.samples, p, options.sigma));
        }
      }
    }
  }
  constexpr std::array<LocationPair, 3> pairs{LocationPair::obs_missed, LocationPair::obs_all,
                                              LocationPair::missed_all};
  for (std::size_t q = 0; q < 3; ++q) {
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        const double p = locations_cdf(setting.params.lambda_law, pairs[q], st[a], st[b]);
        checks.push_back(make_check(std::string("locations[") + prefix + "] " +
                                        to_string(pairs[q]) + " s=" +
                                        short_num(st[a]) +
                                        " t=" + short_num(st[b]),
                                    locs[q][a * 3 + b], options.samples, p, options.sigma));
      }
    }
  }
  return checks;
}

OracleRun parse_oracle_config(const nlohmann::json& j) {
  using namespace detail;
  check_keys(j, {"samples", "min_prob", "sigma", "master_seed", "suites", "output"}, "config");
  OracleRun run;
  if (j.contains("samples")) run.options.samples = as_uint(j["samples"], "samples");
  if (j.contains("min_prob")) run.options.min_prob = as_number(j["min_prob"], "min_prob");
  if (j.contains("sigma")) run.options.sigma = as_number(j["sigma"], "sigma");
  if (j.contains("master_seed")) run.options.seed = as_uint(j["master_seed"], "master_seed");
  if (j.contains("suites")) {
    const auto& suites = j["suites"];
    if (!suites.is_array() || suites.empty()) throw ConfigError("suites: expected a nonempty array");
    run.counts = run.maxima = false;
    for (const auto& s : suites) {
      const std::string name = as_string(s, "suites");
      if (name == "counts") {
        run.counts = true;
      } else if (name == "maxima") {
        run.maxima = true;
      } else {
        throw ConfigError("suites: unknown suite '" + name + "'");
      }
    }
  }
  if (j.contains("output")) {
    check_keys(j["output"], {"dir"}, "output");
    if (j["output"].contains("dir")) run.out_dir = as_string(j["output"]["dir"], "output.dir");
  }
  if (run.options.samples < 1) throw ConfigError("samples must be >= 1");
  if (!(run.options.sigma > 0.0)) throw ConfigError("sigma must be positive");
  return run;
}

std::vector<OracleCheck> run_oracle_suite(const OracleRun& run, std::size_t workers) {
  std::vector<std::function<std::vector<OracleCheck>()>> tasks;
  if (run.counts) {
    const auto settings = default_count_settings();
    for (std::size_t i = 0; i < settings.size(); ++i) {
      tasks.push_back([&run, s = settings[i], i] { return count_equivalence(s, i, run.options); });
    }
  }
  if (run.maxima) {
    const auto settings = default_maxima_settings();
    for (std::size_t i = 0; i < settings.size(); ++i) {
      tasks.push_back([&run, s = settings[i], i] { return maxima_equivalence(s, i, run.options); });
    }
  }
  std::vector<std::vector<OracleCheck>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const std::size_t threads = std::max<std::size_t>(1, std::min(workers, tasks.size()));
  const auto body = [&](std::size_t w) {
    for (std::size_t t = w; t < tasks.size(); t += threads) {
      try {
        results[t] = tasks[t]();
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<OracleCheck> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  return all;
}

std::string oracle_csv(const std::vector<OracleCheck>& checks) {
  std::ostringstream out;
  out << "check_id,empirical,theory,se,z,pass\n";
  for (const OracleCheck& c : checks) {
    out << csv_field(c.id) << ',' << format_number(c.empirical) << ',' << format_number(c.theory)
        << ',' << format_number(c.se) << ',' << format_number(c.z) << ','
        << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace gmx
