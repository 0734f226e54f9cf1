#pragma once

// Greedy recursive partitioning over ternary features, parameterized by a
// split criterion. Used by the CART classifier, forests, AdaBoost stumps
// and both gradient boosters.

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "phishml/dataset.hpp"
#include "phishml/models.hpp"
#include "phishml/rng.hpp"

namespace phishml::detail {

struct GrowParams {
  int max_depth = 0;     // 0 = unlimited
  int min_leaf = 1;      // minimum samples per child
  int max_features = 0;  // 0 = all features at every split
  std::vector<int> features;  // per-tree feature subset; empty = all 30
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Criterion concept:
//   using Stats = ...;                      default-constructible, additive
//   Stats stats_of(Index row) const;
//   void add(Stats& acc, const Stats& s) const;
//   Stats subtract(const Stats& a, const Stats& b) const;
//   int count(const Stats& s) const;        sample count
//   bool splittable(const Stats& node) const;
//   std::optional<double> gain(const Stats& parent, const Stats& left, const Stats& right) const;
//   void make_leaf(TreeNode& node, const Stats& s) const;
//   void annotate(TreeNode& node, const Stats& s) const;   class weights

/// Candidate splits of one feature at one node. Thresholds are midpoints
/// between consecutive ternary values present in the node.
template <typename Criterion>
std::optional<Split> best_split_for_feature(const Criterion& crit, const FeatureMatrix& x, std::span<const Index> rows,
                                            int feature, const typename Criterion::Stats& parent, int min_leaf) {
  using Stats = typename Criterion::Stats;
  std::array<Stats, 3> bins{};
  for (Index r : rows) crit.add(bins[static_cast<std::size_t>(x(r, feature) + 1)], crit.stats_of(r));

  std::array<int, 3> present{};
  int n_present = 0;
  for (int b = 0; b < 3; ++b)
    if (crit.count(bins[static_cast<std::size_t>(b)]) > 0) present[static_cast<std::size_t>(n_present++)] = b;

  std::optional<Split> best;
  Stats left{};
  for (int p = 0; p + 1 < n_present; ++p) {
    crit.add(left, bins[static_cast<std::size_t>(present[static_cast<std::size_t>(p)])]);
    const Stats right = crit.subtract(parent, left);
    if (crit.count(left) < min_leaf || crit.count(right) < min_leaf) continue;
    const auto g = crit.gain(parent, left, right);
    if (!g) continue;
    const double threshold = 0.5 * ((present[static_cast<std::size_t>(p)] - 1) + (present[static_cast<std::size_t>(p + 1)] - 1));
    if (!best || *g > best->gain) best = Split{feature, threshold, *g};
  }
  return best;
}

/// Best split at a node over the given features. Ties keep the earliest
/// (feature, threshold) in ascending order, independent of sampling order.
template <typename Criterion>
std::optional<Split> best_split(const Criterion& crit, const FeatureMatrix& x, std::span<const Index> rows,
                                std::span<const int> features, const typename Criterion::Stats& parent, int min_leaf) {
  std::optional<Split> best;
  for (int f : features) {
    const auto s = best_split_for_feature(crit, x, rows, f, parent, min_leaf);
    if (!s) continue;
    if (!best || s->gain > best->gain ||
        (s->gain == best->gain && (s->feature < best->feature ||
                                   (s->feature == best->feature && s->threshold < best->threshold))))
      best = s;
  }
  return best;
}

template <typename Criterion>
class TreeGrower {
 public:
  using Stats = typename Criterion::Stats;

  TreeGrower(const Criterion& crit, const FeatureMatrix& x, const GrowParams& params, Rng* rng)
      : crit_(crit), x_(x), params_(params), rng_(rng) {}

  /// `rows` may contain duplicates (bootstrap resamples).
  TreeModel grow(std::vector<Index> rows) {
    TreeModel tree;
    rows_ = std::move(rows);
    build(tree, 0, rows_.size(), 0);
    return tree;
  }

 private:
  Stats stats_over(std::size_t begin, std::size_t end) const {
    Stats s{};
    for (std::size_t i = begin; i < end; ++i) crit_.add(s, crit_.stats_of(rows_[i]));
    return s;
  }

  std::vector<int> candidate_features() {
    std::vector<int> all = params_.features;
    if (all.empty()) {
      all.resize(kFeatureCount);
      std::iota(all.begin(), all.end(), 0);
    }
    if (params_.max_features <= 0 || params_.max_features >= static_cast<int>(all.size()) || rng_ == nullptr)
      return all;
    rng_->shuffle(std::span<int>(all));
    return all;
  }

  int build(TreeModel& tree, std::size_t begin, std::size_t end, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const Stats node_stats = stats_over(begin, end);
    crit_.annotate(tree.nodes.back(), node_stats);

    const bool depth_ok = params_.max_depth <= 0 || depth < params_.max_depth;
    std::optional<Split> split;
    if (depth_ok && crit_.splittable(node_stats) && crit_.count(node_stats) >= 2 * params_.min_leaf) {
      const std::span<const Index> rows(rows_.data() + begin, end - begin);
      auto order = candidate_features();
      const std::size_t m = (params_.max_features <= 0 || params_.max_features >= static_cast<int>(order.size()))
                                ? order.size()
                                : static_cast<std::size_t>(params_.max_features);
      split = best_split(crit_, x_, rows, std::span<const int>(order.data(), std::min(m, order.size())), node_stats,
                         params_.min_leaf);
      // Keep drawing features until a usable split appears.
      for (std::size_t next = m; !split && next < order.size(); ++next)
        split = best_split(crit_, x_, rows, std::span<const int>(order.data() + next, 1), node_stats, params_.min_leaf);
    }

    if (!split) {
      crit_.make_leaf(tree.nodes[static_cast<std::size_t>(id)], node_stats);
      return id;
    }

    const auto mid_it = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                              rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](Index r) {
                                                return static_cast<double>(x_(r, split->feature)) <= split->threshold;
                                              });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());
    const int left = build(tree, begin, mid, depth + 1);
    const int right = build(tree, mid, end, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  const Criterion& crit_;
  const FeatureMatrix& x_;
  GrowParams params_;
  Rng* rng_;
  std::vector<Index> rows_;
};

// ---------------------------------------------------------------------------
// Criteria

inline double gini(double w_neg, double w_pos) {
  const double w = w_neg + w_pos;
  if (w <= 0.0) return 0.0;
  const double p = w_pos / w;
  const double q = w_neg / w;
  return 1.0 - p * p - q * q;
}

/// Weighted Gini impurity for classification trees.
struct GiniCriterion {
  struct Stats {
    double w_neg = 0.0;
    double w_pos = 0.0;
    int n = 0;
  };
  const LabelVector& y;
  std::span<const double> weights;  // indexed by row; empty = unit weights

  Stats stats_of(Index r) const {
    const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(r)];
    return y(r) > 0 ? Stats{0.0, w, 1} : Stats{w, 0.0, 1};
  }
  void add(Stats& a, const Stats& s) const {
    a.w_neg += s.w_neg;
    a.w_pos += s.w_pos;
    a.n += s.n;
  }
  Stats subtract(const Stats& a, const Stats& b) const { return {a.w_neg - b.w_neg, a.w_pos - b.w_pos, a.n - b.n}; }
  int count(const Stats& s) const { return s.n; }
  bool splittable(const Stats& s) const { return s.w_neg > 0.0 && s.w_pos > 0.0; }
  std::optional<double> gain(const Stats& p, const Stats& l, const Stats& r) const {
    const double w = p.w_neg + p.w_pos;
    const double wl = l.w_neg + l.w_pos;
    const double wr = r.w_neg + r.w_pos;
    if (w <= 0.0) return std::nullopt;
    return gini(p.w_neg, p.w_pos) - (wl / w) * gini(l.w_neg, l.w_pos) - (wr / w) * gini(r.w_neg, r.w_pos);
  }
  void annotate(TreeNode& node, const Stats& s) const {
    node.weight_phishing = s.w_neg;
    node.weight_legitimate = s.w_pos;
  }
  void make_leaf(TreeNode& node, const Stats& s) const { node.value = s.w_pos >= s.w_neg ? 1.0 : -1.0; }
};

/// Squared-error regression on residuals with a custom leaf value.
struct ResidualCriterion {
  struct Stats {
    double sum = 0.0;    // sum of residuals
    double hess = 0.0;   // sum of hessians (for the Newton leaf value)
    int n = 0;
    int pos = 0;
  };
  std::span<const double> residual;
  std::span<const double> hessian;
  const LabelVector& y;

  Stats stats_of(Index r) const {
    const auto i = static_cast<std::size_t>(r);
    return {residual[i], hessian[i], 1, y(r) > 0 ? 1 : 0};
  }
  void add(Stats& a, const Stats& s) const {
    a.sum += s.sum;
    a.hess += s.hess;
    a.n += s.n;
    a.pos += s.pos;
  }
  Stats subtract(const Stats& a, const Stats& b) const {
    return {a.sum - b.sum, a.hess - b.hess, a.n - b.n, a.pos - b.pos};
  }
  int count(const Stats& s) const { return s.n; }
  bool splittable(const Stats& s) const { return s.n >= 2; }
  std::optional<double> gain(const Stats& p, const Stats& l, const Stats& r) const {
    // Reduction in sum of squared errors around the child means.
    return l.sum * l.sum / l.n + r.sum * r.sum / r.n - p.sum * p.sum / p.n;
  }
  void annotate(TreeNode& node, const Stats& s) const {
    node.weight_phishing = s.n - s.pos;
    node.weight_legitimate = s.pos;
  }
  void make_leaf(TreeNode& node, const Stats& s) const {
    // One Newton step on the logistic loss.
    node.value = s.hess > 1e-12 ? s.sum / s.hess : 0.0;
  }
};

/// Second-order criterion with L2 leaf regularization and a split penalty.
struct SecondOrderCriterion {
  struct Stats {
    double g = 0.0;
    double h = 0.0;
    int n = 0;
    int pos = 0;
  };
  std::span<const double> grad;
  std::span<const double> hess;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  const LabelVector& y;

  Stats stats_of(Index r) const {
    const auto i = static_cast<std::size_t>(r);
    return {grad[i], hess[i], 1, y(r) > 0 ? 1 : 0};
  }
  void add(Stats& a, const Stats& s) const {
    a.g += s.g;
    a.h += s.h;
    a.n += s.n;
    a.pos += s.pos;
  }
  Stats subtract(const Stats& a, const Stats& b) const { return {a.g - b.g, a.h - b.h, a.n - b.n, a.pos - b.pos}; }
  int count(const Stats& s) const { return s.n; }
  bool splittable(const Stats& s) const { return s.n >= 2; }
  double score(const Stats& s) const { return s.g * s.g / (s.h + lambda); }
  std::optional<double> gain(const Stats& p, const Stats& l, const Stats& r) const {
    if (l.h < min_child_weight || r.h < min_child_weight) return std::nullopt;
    const double g = 0.5 * (score(l) + score(r) - score(p)) - gamma;
    // Only splits that lower the regularized objective.
    if (!(g > 1e-12)) return std::nullopt;
    return g;
  }
  void annotate(TreeNode& node, const Stats& s) const {
    node.weight_phishing = s.n - s.pos;
    node.weight_legitimate = s.pos;
  }
  void make_leaf(TreeNode& node, const Stats& s) const { node.value = -s.g / (s.h + lambda); }
};

}  // namespace phishml::detail
