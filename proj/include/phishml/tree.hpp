#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "phishml/dataset.hpp"
#include "phishml/models.hpp"

namespace phishml {

/// CART parameters. max_depth 0 means unlimited; max_features 0 means all.
struct TreeParams {
  int max_depth = 0;
  int min_leaf = 1;
  int max_features = 0;

  void validate() const;
  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// Gini impurity 1 - sum p_c^2 of a node with the given class weights.
double gini_impurity(double weight_phishing, double weight_legitimate);

/// Greedy Gini-decrease partitioning. Deterministic for a fixed seed (the
/// seed only matters when max_features < 30).
TreeModel train_tree(const Dataset& train, const TreeParams& params = {}, std::uint64_t seed = 42);

/// Same, restricted to `rows` (duplicates allowed) with per-row weights
/// indexed by dataset row (empty = unit weights).
TreeModel train_tree(const Dataset& train, std::span<const Index> rows, std::span<const double> weights,
                     const TreeParams& params, std::uint64_t seed);

struct RootSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // impurity decrease, normalized by node weight
};

/// Best root split under the tree trainer's rules, if any split exists.
std::optional<RootSplit> best_root_split(const Dataset& train);

}  // namespace phishml
