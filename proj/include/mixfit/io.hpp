// File formats: row-level training/test CSVs, aggregated band reports,
// JSON model/scenario documents, and forecast reports.
//
// Percent values appear only in aggregated reports and in text/csv output;
// everything inside the library is a fraction.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixfit/cost.hpp"
#include "mixfit/simulate.hpp"
#include "mixfit/types.hpp"

namespace mixfit::io {

inline constexpr const char* kSchemaVersion = "1";

struct TrainingData {
  TrainingModel model;
  /// Per-bin mean of the optional `cost` column, weighted by row weight.
  std::optional<CostProfile> costs;
};

/// Header `feature,class[,weight][,cost]` (any column order). Rows with the
/// same feature value aggregate into one bin. Bins and classes are sorted
/// (numerically when every label is a number).
TrainingData parse_training_csv(std::istream& in, const std::string& source = "<stream>");
TrainingData parse_training_csv(const std::filesystem::path& path);

struct TestData {
  BinnedDistribution test;
  std::optional<CostProfile> costs;
};

/// Header `feature[,weight][,cost]`.
TestData parse_test_csv(std::istream& in, const std::string& source = "<stream>");
TestData parse_test_csv(const std::filesystem::path& path);

/// Header `feature,cost`; repeated features are averaged.
CostProfile parse_costs_csv(std::istream& in, const std::string& source = "<stream>");
CostProfile parse_costs_csv(const std::filesystem::path& path);

struct AggregateRow {
  std::string band;
  double exposure_share = 0.0;  // fraction
  double class1_rate = 0.0;     // fraction
  std::optional<double> test_share;
};

struct AggregateReport {
  std::vector<AggregateRow> rows;
  /// Rate reported on the "All" row, if present.
  std::optional<double> all_rate;
};

struct AggregateOptions {
  /// Bound on |sum(shares) - 1| for either share column.
  double share_tolerance = 1e-6;
  std::string positive_label = "positive";
  std::string negative_label = "negative";
};

struct AggregateData {
  AggregateReport report;
  TrainingModel model;
  std::optional<BinnedDistribution> test;
  std::vector<std::string> warnings;
};

/// Header `band,train_share_pct,train_rate_pct[,test_share_pct]`, values in
/// percent. A row whose band is "All" carries the reported overall rate.
AggregateData parse_aggregate_report(std::istream& in, const AggregateOptions& options = {},
                                     const std::string& source = "<stream>");
AggregateData parse_aggregate_report(const std::filesystem::path& path,
                                     const AggregateOptions& options = {});

AggregateData aggregate_from_report(AggregateReport report, const AggregateOptions& options = {});

// JSON documents. Every top-level object carries "schema_version": "1" and a
// "kind" tag.

nlohmann::json to_json(const BinnedDistribution& d);
BinnedDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainingModel& m);
TrainingModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ShiftScenario& s);
ShiftScenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FitResult& r, const std::vector<std::string>& class_labels);
nlohmann::json to_json(const ComparisonRecord& rec);

enum class Format { Text, Csv, Json };

Format parse_format(const std::string& name);

struct ReportOptions {
  Format format = Format::Text;
  /// Decimals for percent values in text/csv.
  int precision = 1;
};

/// Forecast table: one row per band plus an "All" row, one column per
/// estimator (and per class when k > 2).
std::string write_report(const ComparisonRecord& rec, const ReportOptions& options = {});

std::string read_file(const std::filesystem::path& path);

}  // namespace mixfit::io
