#pragma once

#include <optional>
#include <string>

#include "cards/sim.hpp"
#include "cards/types.hpp"

namespace cards {

struct Dataset {
  DesignMatrix X;
  ResponseVector y;
  std::vector<std::string> predictor_names;
  std::string response_name;
};

/// UTF-8 CSV with a header row; one column is the response (by name, default
/// the first column), the rest are numeric predictors.
Dataset parse_dataset_csv(const std::string& path, const std::string& response = "");

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Writes via a temp file + rename in the target directory.
void atomic_write(const std::string& path, const std::string& content);

std::string fit_report_json(const FitResult& fit, int n, int p);
void write_fit_report(const FitResult& fit, int n, int p, const std::string& path);

/// Round-trip reader for the parts of a fit report tests and tools consume.
struct ParsedFitReport {
  Vector coefficients;
  double intercept = 0.0;
  Partition partition;
  double objective = 0.0;
  std::string method;
};
ParsedFitReport parse_fit_report(const std::string& path);

std::string sim_csv(const SimReport& report);
std::string sim_summary_json(const SimReport& report);
void write_sim_report(const SimReport& report, const std::string& csv_path,
                      const std::string& json_path);

/// Per-method boxplot of one metric column ("pe", "nmi" or "fp").
std::string sim_svg_boxplot(const SimReport& report, const std::string& metric);

struct PartitionFile {
  Partition part;
  std::optional<Vector> values;  // common value per group, when provided
};

/// JSON: either an array of 1-based index arrays, or an object with
/// "groups", optional "zero_group" and optional "values".
PartitionFile parse_partition_json(const std::string& path);

}  // namespace cards
