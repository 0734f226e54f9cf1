#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phishml/dataset.hpp"

namespace phishml {

/// Assignment of every sample to one of k folds.
struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;
  std::uint64_t seed = 0;

  /// Sample indices held out in fold `f`, ascending.
  std::vector<Index> test_indices(int f) const;
  /// Sample indices used for training when fold `f` is held out, ascending.
  std::vector<Index> train_indices(int f) const;
  std::vector<Index> fold_sizes() const;

  /// FNV-1a over (k, assignments); identifies the partition in reports.
  std::uint64_t hash() const;

  std::string to_json() const;
  static FoldPlan from_json(const std::string& text);

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

/// Shuffle each class with a seeded generator, then deal round-robin into
/// k folds. The phishing class is dealt first and the legitimate class
/// continues from the next fold, so fold sizes differ by at most one.
FoldPlan stratified_kfold(const Dataset& d, int k, std::uint64_t seed);

/// Stratified train/test split; test size is round(test_fraction * n).
std::pair<Dataset, Dataset> holdout_split(const Dataset& d, double test_fraction, std::uint64_t seed);

}  // namespace phishml
