#include <doctest.h>

#include <cmath>

#include "phishml/crossval.hpp"
#include "phishml/error.hpp"
#include "phishml/report.hpp"
#include "support.hpp"

using namespace phishml;

namespace {

PredictFn constant(Label l) {
  return [l](const Dataset& test) { return std::vector<Label>(static_cast<std::size_t>(test.size()), l); };
}

ClassifierSpec knn_spec(int k) {
  ClassifierSpec s = ClassifierSpec::defaults(Family::Knn, 5);
  std::get<KnnParams>(s.hyperparams).k = k;
  return s;
}

}  // namespace

TEST_CASE("cross-validation of a constant legitimate predictor") {
  const Dataset d = test::random_dataset(103, 61);
  const FoldPlan plan = stratified_kfold(d, 10, 1);
  const CrossValReport r = cross_validate(
      d, [](const Dataset&) { return constant(Label::Legitimate); }, "always-legit", plan);
  CHECK(r.pooled.total() == d.size());
  CHECK(r.pooled.n_pp == 0);
  CHECK(r.pooled.n_ll == d.class_counts()[1]);
  CHECK(*r.aggregate.recall.value == 0.0);
  CHECK_FALSE(r.aggregate.precision.defined());
  CHECK(r.per_fold.size() == 10);
  Index evaluated = 0;
  for (const auto& f : r.per_fold) evaluated += f.counts.total();
  CHECK(evaluated == d.size());
  CHECK(render_table({r}).find("n/a(no phishing predictions)") != std::string::npos);
}

TEST_CASE("cross-validation is deterministic and independent of jobs") {
  const Dataset d = test::random_dataset(300, 62, 0.3);
  ClassifierSpec spec = ClassifierSpec::defaults(Family::Forest, 8);
  std::get<ForestParams>(spec.hyperparams).n_trees = 10;
  const CrossValReport a = cross_validate(d, spec, 5, 3, 1);
  const CrossValReport b = cross_validate(d, spec, 5, 3, 3);
  CHECK(a.pooled == b.pooled);
  CHECK(reports_to_json({a})["runs"] == reports_to_json({b})["runs"]);
  CHECK(a.fold_plan_hash == stratified_kfold(d, 5, 3).hash());
}

TEST_CASE("cross-validation checks the plan against the data") {
  const Dataset d = test::random_dataset(40, 63);
  const FoldPlan plan = stratified_kfold(test::random_dataset(50, 63), 5, 1);
  CHECK_THROWS_AS(cross_validate(d, knn_spec(3), plan), SpecError);
}

TEST_CASE("sweeps share one fold plan") {
  const Dataset d = test::random_dataset(120, 64, 0.3);
  const SweepResult s = sweep(d, knn_spec(5), "knn-k", {"1", "3", "3"}, 4, 2);
  REQUIRE(s.reports.size() == 3);
  CHECK(s.reports[0].fold_plan_hash == s.reports[1].fold_plan_hash);
  CHECK(s.reports[1].pooled == s.reports[2].pooled);
  CHECK(s.reports[1].name == "knn-k3");
  CHECK(sweep_csv(s).rfind("axis_value,accuracy,recall,precision,f1\n1,", 0) == 0);

  CHECK(default_axis_values("svm-kernel").size() == 4);
  CHECK(apply_axis(knn_spec(5), "mlp-depth", "4").family() == Family::Mlp);
  CHECK(std::get<MlpParams>(apply_axis(knn_spec(5), "mlp-depth", "4").hyperparams).hidden.size() == 4);
  CHECK_THROWS_AS(apply_axis(knn_spec(5), "knn-k", "zero"), SpecError);
  CHECK_THROWS_AS(default_axis_values("depth"), SpecError);
}

TEST_CASE("reports survive JSON") {
  const Dataset d = test::random_dataset(90, 65, 0.3);
  std::vector<CrossValReport> reports{cross_validate(d, knn_spec(3), 3, 1),
                                      cross_validate(d, [](const Dataset&) { return constant(Label::Phishing); },
                                                     "always-phish", stratified_kfold(d, 3, 1))};
  const auto j = reports_to_json(reports);
  CHECK(j.contains("timing"));
  CHECK_FALSE(j["runs"][0]["aggregate"].contains("train_time_s"));
  CHECK(reports_from_json(nlohmann::json::parse(j.dump())) == reports);
  CHECK_THROWS_AS(reports_from_json(nlohmann::json::object()), Error);
}

TEST_CASE("report renderings") {
  const Dataset d = test::random_dataset(60, 66, 0.3);
  const std::vector<CrossValReport> reports{cross_validate(d, knn_spec(3), 3, 1)};
  const std::string table = emit_report(reports, ReportFormat::Text);
  CHECK(table.rfind("classifier", 0) == 0);
  CHECK(table.find("train time (s)") != std::string::npos);
  CHECK(table.find("F1 score") != std::string::npos);
  const std::string csv = emit_report(reports, ReportFormat::Csv);
  CHECK(csv.rfind("classifier,train_time_s,test_time_s,accuracy,recall,precision,f1\nknn,", 0) == 0);
  CHECK_THROWS_AS(emit_report({}, ReportFormat::Text), SpecError);
  CHECK_THROWS_AS(report_format_from_string("xml"), SpecError);
}

TEST_CASE("correlation matrix matches a two-pass oracle") {
  const Dataset d = test::make_dataset({{1, 1, -1, 1}, {-1, 0, 1, -1}, {1, -1, -1, 1}, {-1, 1, 1, -1}, {1, 0, -1, -1}});
  const Eigen::MatrixXd r = correlation_matrix(d);
  REQUIRE(r.rows() == kFeatureCount + 1);
  auto column = [&](int c) {
    Eigen::VectorXd v(d.size());
    for (Index i = 0; i < d.size(); ++i) v(i) = c < kFeatureCount ? d.features()(i, c) : d.labels()(i);
    return v;
  };
  auto pearson = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double ma = a.mean(), mb = b.mean();
    double sab = 0, saa = 0, sbb = 0;
    for (Index i = 0; i < a.size(); ++i) {
      sab += (a(i) - ma) * (b(i) - mb);
      saa += (a(i) - ma) * (a(i) - ma);
      sbb += (b(i) - mb) * (b(i) - mb);
    }
    return sab / std::sqrt(saa * sbb);
  };
  for (int i : {0, 1, 2, kFeatureCount})
    for (int j : {0, 1, 2, kFeatureCount}) CHECK(std::abs(r(i, j) - pearson(column(i), column(j))) < 1e-12);
  CHECK(r(0, kFeatureCount) == r(kFeatureCount, 0));
  CHECK(std::isnan(r(5, 5)));
  CHECK(std::isnan(r(0, 5)));
  CHECK(correlation_to_json(r, d.schema())["matrix"][5][5].is_null());
  CHECK_THROWS_AS(correlation_matrix(Dataset{}), SpecError);
}

TEST_CASE("summary renderings") {
  const auto stats = summarize(test::make_dataset({{1, 1}, {-1, -1}}));
  const std::string text = render_summary(stats);
  CHECK(text.find("Having IP Address") != std::string::npos);
  CHECK(text.find("1.4142") != std::string::npos);
  CHECK(summary_to_json(stats)["Result"]["mean"] == 0.0);
}
