#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gmx/experiment.hpp"

namespace gmx {

/// 17 significant digits, '.' radix, independent of the global locale.
/// Non-finite values print as inf, -inf and nan.
std::string format_number(double v);

/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Columns: event_id, n, gamma, lambda_law, reps, p_hat, se, theory_limit,
/// theory_finite_n, z_limit, z_finite_n, pass, config_hash. Unavailable
/// values are empty; pass is true, false or na.
void write_report_csv(const ComparisonReport& report, std::ostream& out);

/// JSON mirror of the CSV rows with the canonical config. Numbers use the
/// same 17-digit format; non-finite numbers are written as strings and
/// unavailable values as null.
void write_report_json(const ComparisonReport& report, std::ostream& out);

struct ReportPaths {
  std::filesystem::path csv;
  std::filesystem::path json;
};

/// Writes <dir>/<name>_<tag>_<hash>.{csv,json}. An existing file with
/// different content is never replaced; that raises ConfigError.
ReportPaths write_report_files(const ComparisonReport& report, const std::filesystem::path& dir,
                               const std::string& name, const std::string& tag);

/// Writes text to path under the same no-silent-overwrite rule.
void write_file_once(const std::filesystem::path& path, const std::string& text);

}  // namespace gmx
