#include "gmx/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "gmx/errors.hpp"

namespace gmx {
namespace {

std::string opt_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_number(double v) {
  if (!std::isfinite(v)) return json_string(format_number(v));
  return format_number(v);
}

std::string json_opt(const std::optional<double>& v) { return v ? json_number(*v) : "null"; }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_report_csv(const ComparisonReport& report, std::ostream& out) {
  out << "event_id,n,gamma,lambda_law,reps,p_hat,se,theory_limit,theory_finite_n,z_limit,"
         "z_finite_n,pass,config_hash\n";
  for (const ComparisonRow& r : report.rows) {
    out << csv_field(r.estimate.event_id) << ',' << report.n << ',' << format_number(report.gamma)
        << ',' << csv_field(report.lambda_law) << ',' << r.estimate.reps << ','
        << format_number(r.estimate.p_hat) << ',' << format_number(r.estimate.se) << ','
        << opt_number(r.theory_limit) << ',' << opt_number(r.theory_finite_n) << ','
        << opt_number(r.z_limit) << ',' << opt_number(r.z_finite_n) << ','
        << (r.pass ? (*r.pass ? "true" : "false") : "na") << ',' << report.config_hash << '\n';
  }
}

void write_report_json(const ComparisonReport& report, std::ostream& out) {
  out << "{\n  \"config_hash\": " << json_string(report.config_hash) << ",\n";
  out << "  \"config\": " << report.config.dump() << ",\n";
  out << "  \"all_pass\": " << (report.all_pass() ? "true" : "false") << ",\n";
  out << "  \"rows\": [";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const ComparisonRow& r = report.rows[i];
    out << (i == 0 ? "\n" : ",\n");
    out << "    {\"event_id\": " << json_string(r.estimate.event_id) << ", \"n\": " << report.n
        << ", \"gamma\": " << json_number(report.gamma)
        << ", \"lambda_law\": " << json_string(report.lambda_law)
        << ", \"reps\": " << r.estimate.reps << ", \"hits\": " << r.estimate.hits
        << ", \"p_hat\": " << json_number(r.estimate.p_hat)
        << ", \"se\": " << json_number(r.estimate.se)
        << ", \"ci_low\": " << json_number(r.estimate.ci_low)
        << ", \"ci_high\": " << json_number(r.estimate.ci_high)
        << ", \"theory_limit\": " << json_opt(r.theory_limit)
        << ", \"theory_finite_n\": " << json_opt(r.theory_finite_n)
        << ", \"z_limit\": " << json_opt(r.z_limit)
        << ", \"z_finite_n\": " << json_opt(r.z_finite_n)
        << ", \"pass\": " << (r.pass ? (*r.pass ? "true" : "false") : "null") << "}";
  }
  out << "\n  ]\n}\n";
}

void write_file_once(const std::filesystem::path& path, const std::string& text) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    const std::string old((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (old == text) return;
    throw ConfigError("refusing to overwrite '" + path.string() + "' with different content");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

ReportPaths write_report_files(const ComparisonReport& report, const std::filesystem::path& dir,
                               const std::string& name, const std::string& tag) {
  std::filesystem::create_directories(dir);
  const std::string stem = name + "_" + tag + "_" + report.config_hash;
  ReportPaths paths{dir / (stem + ".csv"), dir / (stem + ".json")};
  std::ostringstream csv;
  write_report_csv(report, csv);
  std::ostringstream js;
  write_report_json(report, js);
  write_file_once(paths.csv, csv.str());
  write_file_once(paths.json, js.str());
  return paths;
}

}  // namespace gmx
