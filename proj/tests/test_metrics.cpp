#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "phishml/error.hpp"
#include "phishml/metrics.hpp"
#include "phishml/rng.hpp"

using namespace phishml;

TEST_CASE("confusion counts by enumeration") {
  const std::vector<int> truths{-1, -1, 1, 1};
  const std::vector<int> preds{-1, 1, 1, 1};
  const ConfusionCounts c = confusion(preds, truths);
  CHECK(c.n_pp == 1);
  CHECK(c.n_pl == 1);
  CHECK(c.n_ll == 2);
  CHECK(c.n_lp == 0);
}

TEST_CASE("confusion validates its inputs") {
  const std::vector<int> a{1, -1}, b{1}, bad{1, 0};
  CHECK_THROWS_AS(confusion(a, b), SpecError);
  CHECK_THROWS_AS(confusion(bad, a), SpecError);
}

TEST_CASE("metrics by substitution") {
  const MetricsReport m = metrics({9, 1, 2, 8});
  CHECK(m.accuracy == doctest::Approx(0.85));
  CHECK(*m.recall.value == doctest::Approx(0.8));
  CHECK(*m.precision.value == doctest::Approx(8.0 / 9.0));
  CHECK(*m.f1.value == doctest::Approx(16.0 / 19.0));

  const MetricsReport perfect = metrics({5, 0, 0, 5});
  CHECK(perfect.accuracy == 1.0);
  CHECK(*perfect.recall.value == 1.0);
  CHECK(*perfect.precision.value == 1.0);
  CHECK(*perfect.f1.value == 1.0);
}

TEST_CASE("F1 recomputed from rounded precision and recall") {
  CHECK(std::abs(*f1_score(0.925700, 0.943968).value - 0.934704) < 1e-4);
  CHECK(*f1_score(0.3, 0.7).value == *f1_score(0.7, 0.3).value);
  CHECK_FALSE(f1_score(0.0, 0.0).defined());
}

TEST_CASE("undefined metrics carry a reason") {
  const MetricsReport no_phishing = metrics({10, 0, 0, 0});
  CHECK_FALSE(no_phishing.recall.defined());
  CHECK_FALSE(no_phishing.precision.defined());
  CHECK_FALSE(no_phishing.f1.defined());
  CHECK(render(no_phishing.recall) == "n/a(no phishing samples)");
  CHECK(render(no_phishing.precision) == "n/a(no phishing predictions)");

  const MetricsReport all_legit = metrics({10, 0, 4, 0});
  CHECK(*all_legit.recall.value == 0.0);
  CHECK_FALSE(all_legit.precision.defined());

  const MetricsReport wrong = metrics({0, 3, 4, 0});
  CHECK(*wrong.recall.value == 0.0);
  CHECK(*wrong.precision.value == 0.0);
  CHECK(render(wrong.f1) == "n/a(precision and recall are both zero)");

  CHECK_THROWS_AS(metrics({}), SpecError);
  CHECK(render(MetricValue::of(0.5), 3) == "0.500");
}

TEST_CASE("metrics agree with a per-sample recount") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(1 + rng.uniform_index(500));
    const double bias = rng.uniform01();
    std::vector<int> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng.uniform01() < bias ? 1 : -1;
      pred[i] = rng.uniform01() < 0.7 ? truth[i] : -truth[i];
    }
    CAPTURE(trial);
    CHECK(oracle::check_metrics(oracle::recount(pred, truth), metrics(confusion(pred, truth))) == "");
  }
}
