#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "phishml/crossval.hpp"
#include "phishml/dataset.hpp"

namespace phishml {

inline constexpr int kReportFormatVersion = 1;

enum class ReportFormat { Text, Json, Csv };

ReportFormat report_format_from_string(std::string_view s);

/// Timing values live under a separate top-level "timing" object so the
/// "runs" subtree is reproducible byte for byte.
nlohmann::json reports_to_json(const std::vector<CrossValReport>& reports);
std::vector<CrossValReport> reports_from_json(const nlohmann::json& j);

/// One row per run: classifier, train time (s), test time (s), accuracy,
/// recall, precision, F1 score.
std::string render_table(const std::vector<CrossValReport>& reports);
std::string render_csv(const std::vector<CrossValReport>& reports);

/// Throws SpecError on an empty list.
std::string emit_report(const std::vector<CrossValReport>& reports, ReportFormat format);

nlohmann::json sweep_to_json(const SweepResult& s);
/// axis_value,accuracy,recall,precision,f1
std::string sweep_csv(const SweepResult& s);

std::string render_summary(const std::vector<ColumnStats>& stats);
nlohmann::json summary_to_json(const std::vector<ColumnStats>& stats);

/// Rows and columns named after the schema plus "Result"; NaN becomes null.
nlohmann::json correlation_to_json(const Eigen::MatrixXd& r, const FeatureSchema& schema);

}  // namespace phishml
