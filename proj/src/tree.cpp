#include "phishml/tree.hpp"

#include <numeric>

#include "phishml/error.hpp"
#include "tree_builder.hpp"

namespace phishml {

void TreeParams::validate() const {
  if (max_depth < 0) throw SpecError("tree: max_depth must be >= 0 (0 = unlimited)");
  if (min_leaf < 1) throw SpecError("tree: min_leaf must be >= 1");
  if (max_features < 0 || max_features > kFeatureCount) throw SpecError("tree: max_features must lie in [0, 30]");
}

double gini_impurity(double weight_phishing, double weight_legitimate) {
  return detail::gini(weight_phishing, weight_legitimate);
}

TreeModel train_tree(const Dataset& train, std::span<const Index> rows, std::span<const double> weights,
                     const TreeParams& params, std::uint64_t seed) {
  params.validate();
  if (rows.empty()) throw SpecError("tree: empty training set");
  Rng rng(seed);
  const detail::GiniCriterion crit{train.labels(), weights};
  detail::TreeGrower grower(crit, train.features(), {params.max_depth, params.min_leaf, params.max_features, {}}, &rng);
  return grower.grow(std::vector<Index>(rows.begin(), rows.end()));
}

TreeModel train_tree(const Dataset& train, const TreeParams& params, std::uint64_t seed) {
  std::vector<Index> rows(static_cast<std::size_t>(train.size()));
  std::iota(rows.begin(), rows.end(), Index{0});
  return train_tree(train, rows, {}, params, seed);
}

std::optional<RootSplit> best_root_split(const Dataset& train) {
  std::vector<Index> rows(static_cast<std::size_t>(train.size()));
  std::iota(rows.begin(), rows.end(), Index{0});
  const detail::GiniCriterion crit{train.labels(), {}};
  detail::GiniCriterion::Stats parent{};
  for (Index r : rows) crit.add(parent, crit.stats_of(r));
  std::vector<int> features(kFeatureCount);
  std::iota(features.begin(), features.end(), 0);
  const auto s = detail::best_split(crit, train.features(), rows, features, parent, 1);
  if (!s) return std::nullopt;
  return RootSplit{s->feature, s->threshold, s->gain};
}

int TreeModel::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

int TreeModel::leaf_count() const {
  int n = 0;
  for (const auto& node : nodes) n += node.is_leaf() ? 1 : 0;
  return n;
}

}  // namespace phishml
