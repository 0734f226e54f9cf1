#include "phishml/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "phishml/error.hpp"

namespace phishml {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "phishml-report";

json metric_to_json(const MetricValue& v) {
  if (v.value) return *v.value;
  return {{"na", v.reason}};
}

MetricValue metric_from_json(const json& j) {
  if (j.is_number()) return MetricValue::of(j.get<double>());
  return MetricValue::undefined(j.at("na").get<std::string>());
}

json counts_to_json(const ConfusionCounts& c) {
  return {{"n_LL", c.n_ll}, {"n_LP", c.n_lp}, {"n_PL", c.n_pl}, {"n_PP", c.n_pp}};
}

ConfusionCounts counts_from_json(const json& j) {
  return {j.at("n_LL").get<std::int64_t>(), j.at("n_LP").get<std::int64_t>(), j.at("n_PL").get<std::int64_t>(),
          j.at("n_PP").get<std::int64_t>()};
}

json scores_to_json(const MetricsReport& m) {
  return {{"accuracy", m.accuracy},
          {"recall", metric_to_json(m.recall)},
          {"precision", metric_to_json(m.precision)},
          {"f1", metric_to_json(m.f1)}};
}

void scores_from_json(const json& j, MetricsReport& m) {
  m.accuracy = j.at("accuracy").get<double>();
  m.recall = metric_from_json(j.at("recall"));
  m.precision = metric_from_json(j.at("precision"));
  m.f1 = metric_from_json(j.at("f1"));
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string csv_metric(const MetricValue& v) { return v.value ? fixed(*v.value, 6) : std::string(); }

std::string display(std::string name) {
  std::replace(name.begin(), name.end(), '_', ' ');
  return name;
}

std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        line += row[c] + std::string(width[c] - row[c].size(), ' ');
      } else {
        line += "  " + std::string(width[c] - row[c].size(), ' ') + row[c];
      }
    }
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw SpecError("unknown format '" + std::string(s) + "' (expected text, json or csv)");
}

json reports_to_json(const std::vector<CrossValReport>& reports) {
  json runs = json::array();
  json timing = json::array();
  for (const auto& r : reports) {
    json folds = json::array();
    json fold_times = json::array();
    for (const auto& f : r.per_fold) {
      json fj = scores_to_json(f.metrics);
      fj["fold"] = f.fold;
      fj["counts"] = counts_to_json(f.counts);
      fj["converged"] = f.converged;
      if (!f.warning.empty()) fj["warning"] = f.warning;
      folds.push_back(std::move(fj));
      fold_times.push_back({{"train_time_s", f.metrics.train_time_s}, {"test_time_s", f.metrics.test_time_s}});
    }
    json aggregate = scores_to_json(r.aggregate);
    aggregate["counts"] = counts_to_json(r.pooled);
    json run{{"name", r.name},
             {"k", r.k},
             {"seed", r.seed},
             {"fold_plan_hash", r.fold_plan_hash},
             {"per_fold", std::move(folds)},
             {"aggregate", std::move(aggregate)}};
    if (r.spec) run["spec"] = to_json(*r.spec);
    runs.push_back(std::move(run));
    timing.push_back({{"name", r.name},
                      {"mean_train_time_s", r.aggregate.train_time_s},
                      {"mean_test_time_s", r.aggregate.test_time_s},
                      {"per_fold", std::move(fold_times)}});
  }
  return {{"format", kFormatTag}, {"version", kReportFormatVersion}, {"runs", std::move(runs)},
          {"timing", std::move(timing)}};
}

std::vector<CrossValReport> reports_from_json(const json& j) {
  try {
    if (j.value("format", "") != kFormatTag) throw Error("report: not a phishml report");
    if (j.at("version").get<int>() != kReportFormatVersion) throw Error("report: unsupported version");
    const json& runs = j.at("runs");
    const json& timing = j.at("timing");
    if (runs.size() != timing.size()) throw Error("report: runs and timing differ in length");
    std::vector<CrossValReport> out;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const json& rj = runs[i];
      const json& tj = timing[i];
      CrossValReport r;
      r.name = rj.at("name").get<std::string>();
      r.k = rj.at("k").get<int>();
      r.seed = rj.at("seed").get<std::uint64_t>();
      r.fold_plan_hash = rj.at("fold_plan_hash").get<std::uint64_t>();
      if (rj.contains("spec")) r.spec = spec_from_json(rj.at("spec"));
      const json& folds = rj.at("per_fold");
      const json& fold_times = tj.at("per_fold");
      if (folds.size() != fold_times.size()) throw Error("report: fold timing count mismatch");
      for (std::size_t f = 0; f < folds.size(); ++f) {
        FoldResult fr;
        fr.fold = folds[f].at("fold").get<int>();
        fr.counts = counts_from_json(folds[f].at("counts"));
        scores_from_json(folds[f], fr.metrics);
        fr.converged = folds[f].at("converged").get<bool>();
        fr.warning = folds[f].value("warning", "");
        fr.metrics.train_time_s = fold_times[f].at("train_time_s").get<double>();
        fr.metrics.test_time_s = fold_times[f].at("test_time_s").get<double>();
        r.per_fold.push_back(std::move(fr));
      }
      r.pooled = counts_from_json(rj.at("aggregate").at("counts"));
      scores_from_json(rj.at("aggregate"), r.aggregate);
      r.aggregate.train_time_s = tj.at("mean_train_time_s").get<double>();
      r.aggregate.test_time_s = tj.at("mean_test_time_s").get<double>();
      out.push_back(std::move(r));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("report: ") + e.what());
  }
}

std::string render_table(const std::vector<CrossValReport>& reports) {
  std::vector<std::vector<std::string>> rows{
      {"classifier", "train time (s)", "test time (s)", "accuracy", "recall", "precision", "F1 score"}};
  for (const auto& r : reports) {
    const auto& a = r.aggregate;
    rows.push_back({r.name + (r.converged() ? "" : " *"), fixed(a.train_time_s, 6), fixed(a.test_time_s, 6),
                    fixed(a.accuracy, 6), render(a.recall), render(a.precision), render(a.f1)});
  }
  std::string out = aligned(rows);
  if (std::any_of(reports.begin(), reports.end(), [](const auto& r) { return !r.converged(); }))
    out += "* did not converge in at least one fold\n";
  return out;
}

std::string render_csv(const std::vector<CrossValReport>& reports) {
  std::string out = "classifier,train_time_s,test_time_s,accuracy,recall,precision,f1\n";
  for (const auto& r : reports) {
    const auto& a = r.aggregate;
    out += r.name + "," + fixed(a.train_time_s, 6) + "," + fixed(a.test_time_s, 6) + "," + fixed(a.accuracy, 6) + "," +
           csv_metric(a.recall) + "," + csv_metric(a.precision) + "," + csv_metric(a.f1) + "\n";
  }
  return out;
}

std::string emit_report(const std::vector<CrossValReport>& reports, ReportFormat format) {
  if (reports.empty()) throw SpecError("emit_report: no reports");
  switch (format) {
    case ReportFormat::Text: return render_table(reports);
    case ReportFormat::Json: return reports_to_json(reports).dump(2) + "\n";
    case ReportFormat::Csv: return render_csv(reports);
  }
  throw SpecError("emit_report: unknown format");
}

json sweep_to_json(const SweepResult& s) {
  json j = reports_to_json(s.reports);
  j["axis"] = {{"name", s.axis_name}, {"values", s.axis_values}};
  return j;
}

std::string sweep_csv(const SweepResult& s) {
  std::string out = "axis_value,accuracy,recall,precision,f1\n";
  for (std::size_t i = 0; i < s.reports.size(); ++i) {
    const auto& a = s.reports[i].aggregate;
    out += s.axis_values[i] + "," + fixed(a.accuracy, 6) + "," + csv_metric(a.recall) + "," +
           csv_metric(a.precision) + "," + csv_metric(a.f1) + "\n";
  }
  return out;
}

std::string render_summary(const std::vector<ColumnStats>& stats) {
  std::vector<std::vector<std::string>> rows{{"feature", "mean", "std"}};
  for (const auto& s : stats) rows.push_back({display(s.name), fixed(s.mean, 4), fixed(s.std, 4)});
  return aligned(rows);
}

json summary_to_json(const std::vector<ColumnStats>& stats) {
  json j = json::object();
  for (const auto& s : stats) j[s.name] = {{"mean", s.mean}, {"std", s.std}};
  return j;
}

json correlation_to_json(const Eigen::MatrixXd& r, const FeatureSchema& schema) {
  std::vector<std::string> names = schema.names();
  names.emplace_back(kLabelColumn);
  json matrix = json::array();
  for (Index i = 0; i < r.rows(); ++i) {
    json row = json::array();
    for (Index c = 0; c < r.cols(); ++c) row.push_back(std::isnan(r(i, c)) ? json(nullptr) : json(r(i, c)));
    matrix.push_back(std::move(row));
  }
  return {{"columns", names}, {"matrix", std::move(matrix)}};
}

}  // namespace phishml
