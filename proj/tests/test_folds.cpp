#include <doctest.h>

#include "oracles.hpp"
#include "phishml/error.hpp"
#include "phishml/folds.hpp"
#include "support.hpp"

using namespace phishml;

TEST_CASE("stratified_kfold partitions and stratifies") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    const int k = 2 + static_cast<int>(rng.uniform_index(9));
    const Index n = 2 * k + static_cast<Index>(rng.uniform_index(300));
    Dataset d = test::random_dataset(n, s, 0.3, 0.2 + 0.6 * rng.uniform01());
    const auto c = d.class_counts();
    if (c[0] < k || c[1] < k) continue;
    CAPTURE(s);
    CHECK(oracle::check_fold_plan(d, stratified_kfold(d, k, s), k) == "");
  }
}

TEST_CASE("stratified_kfold is a function of the seed") {
  const Dataset d = test::random_dataset(500, 1);
  CHECK(stratified_kfold(d, 10, 7) == stratified_kfold(d, 10, 7));
  CHECK(stratified_kfold(d, 10, 7).hash() == stratified_kfold(d, 10, 7).hash());
  CHECK_FALSE(stratified_kfold(d, 10, 7) == stratified_kfold(d, 10, 8));
}

TEST_CASE("stratified_kfold rejects impossible requests") {
  const Dataset d = test::make_dataset({{1, 1}, {1, -1}, {1, 1}});
  CHECK_THROWS_AS(stratified_kfold(d, 1, 0), SpecError);
  CHECK_THROWS_AS(stratified_kfold(d, 2, 0), SpecError);
}

TEST_CASE("fold plans survive JSON") {
  const Dataset d = test::random_dataset(60, 2);
  const FoldPlan p = stratified_kfold(d, 5, 3);
  CHECK(FoldPlan::from_json(p.to_json()) == p);
  CHECK_THROWS(FoldPlan::from_json("{\"k\": 2, \"assignments\": [0, 5], \"seed\": 1}"));
}

TEST_CASE("holdout_split keeps class ratios") {
  const Dataset d = test::random_dataset(1000, 4, 0.3, 0.3);
  const auto [train, test] = holdout_split(d, 0.1, 9);
  CHECK(test.size() == 100);
  CHECK(train.size() == 900);
  const auto all = d.class_counts();
  const auto held = test.class_counts();
  CHECK(std::abs(static_cast<double>(held[0]) - 0.1 * static_cast<double>(all[0])) <= 1.0);
  CHECK_THROWS_AS(holdout_split(d, 0.0, 1), SpecError);
}
