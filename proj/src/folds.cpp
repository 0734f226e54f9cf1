#include "phishml/folds.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "phishml/error.hpp"
#include "phishml/rng.hpp"

namespace phishml {

namespace {

std::array<std::vector<Index>, 2> indices_by_class(const Dataset& d) {
  std::array<std::vector<Index>, 2> by_class;
  for (Index i = 0; i < d.size(); ++i) by_class[d.labels()(i) > 0 ? 1 : 0].push_back(i);
  return by_class;
}

}  // namespace

std::vector<Index> FoldPlan::test_indices(int f) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == f) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<Index> FoldPlan::train_indices(int f) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != f) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<Index> FoldPlan::fold_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

std::uint64_t FoldPlan::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(k));
  for (int a : assignments) mix(static_cast<std::uint64_t>(a));
  return h;
}

std::string FoldPlan::to_json() const {
  nlohmann::json j{{"k", k}, {"seed", seed}, {"assignments", assignments}};
  return j.dump();
}

FoldPlan FoldPlan::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FoldPlan p;
  p.k = j.at("k").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.assignments = j.at("assignments").get<std::vector<int>>();
  for (int a : p.assignments)
    if (a < 0 || a >= p.k) throw DataError("fold plan: assignment out of range");
  return p;
}

FoldPlan stratified_kfold(const Dataset& d, int k, std::uint64_t seed) {
  if (k < 2) throw SpecError("stratified_kfold: k must be at least 2");
  auto by_class = indices_by_class(d);
  for (const auto& members : by_class)
    if (static_cast<Index>(members.size()) < k)
      throw SpecError("stratified_kfold: a class has fewer than k = " + std::to_string(k) + " samples");

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(static_cast<std::size_t>(d.size()), -1);
  Rng rng(seed);
  int next_fold = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<Index>(members));
    for (Index idx : members) {
      plan.assignments[static_cast<std::size_t>(idx)] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return plan;
}

std::pair<Dataset, Dataset> holdout_split(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw SpecError("holdout_split: fraction must lie in (0, 1)");
  const auto n = d.size();
  const auto test_total = static_cast<Index>(std::llround(test_fraction * static_cast<double>(n)));
  if (test_total <= 0 || test_total >= n) throw SpecError("holdout_split: split leaves an empty side");

  auto by_class = indices_by_class(d);
  // Largest-remainder apportionment of test_total across the two classes.
  std::array<Index, 2> take{};
  std::array<double, 2> remainder{};
  Index assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double exact = test_fraction * static_cast<double>(by_class[c].size());
    take[c] = static_cast<Index>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += take[c];
  }
  while (assigned < test_total) {
    const std::size_t c = remainder[1] > remainder[0] ? 1 : 0;
    ++take[c];
    remainder[c] = -1.0;
    ++assigned;
  }
  while (assigned > test_total) {
    const std::size_t c = take[1] > take[0] ? 1 : 0;
    --take[c];
    --assigned;
  }

  Rng rng(seed);
  std::vector<Index> train, test;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    rng.shuffle(std::span<Index>(members));
    for (std::size_t i = 0; i < members.size(); ++i)
      (static_cast<Index>(i) < take[c] ? test : train).push_back(members[i]);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {d.subset(train), d.subset(test)};
}

}  // namespace phishml
