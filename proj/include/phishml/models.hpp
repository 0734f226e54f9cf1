#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "phishml/dataset.hpp"
#include "phishml/kernels.hpp"

namespace phishml {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// score = w . x + b; score >= 0 predicts legitimate.
struct LinearModel {
  VectorXd weights = VectorXd::Zero(kFeatureCount);
  double bias = 0.0;
};

enum class DistanceMetric { Euclidean, Manhattan };

/// Lazy learner: the training set itself.
struct KnnModel {
  Matrix<double> points;
  VectorXd squared_norms;
  LabelVector labels;
  int k = 5;
  DistanceMetric metric = DistanceMetric::Euclidean;
};

struct KernelMachineModel {
  Matrix<double> support_vectors;
  VectorXd alphas;
  LabelVector labels;
  double bias = 0.0;
  KernelSpec kernel;
};

/// Node of a binary tree stored in a flat array (root at index 0).
/// Internal nodes route x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  /// Leaf output: a label (+-1) for classification trees, a real score
  /// contribution for boosting trees.
  double value = 0.0;
  /// Training weight of each class reaching the node (phishing, legitimate).
  double weight_phishing = 0.0;
  double weight_legitimate = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct TreeModel {
  std::vector<TreeNode> nodes;

  template <typename Derived>
  const TreeNode& leaf_for(const Eigen::MatrixBase<Derived>& x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      i = static_cast<double>(x(n.feature)) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)];
  }

  template <typename Derived>
  double eval(const Eigen::MatrixBase<Derived>& x) const {
    return leaf_for(x).value;
  }

  int depth() const;
  int leaf_count() const;
};

enum class Aggregation { MajorityVote, WeightedVote, AdditiveScore };

struct EnsembleModel {
  std::vector<TreeModel> members;
  std::vector<double> member_weights;
  Aggregation aggregation = Aggregation::MajorityVote;
  /// Starting score of additive models (prior log-odds).
  double base_score = 0.0;
};

enum class Activation { Relu, Softplus };

/// Fully connected network. weights[l] maps layer l (columns) to layer
/// l + 1 (rows). Hidden layers use `hidden_activation`; the single output
/// unit is a logistic sigmoid giving P(legitimate).
struct MlpModel {
  std::vector<int> layer_sizes;
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;
  Activation hidden_activation = Activation::Relu;
};

using TrainedModel = std::variant<LinearModel, KnnModel, KernelMachineModel, TreeModel, EnsembleModel, MlpModel>;

std::string_view model_kind(const TrainedModel& m) noexcept;

/// Real-valued score whose sign is the prediction (0 maps to legitimate).
/// x must have kFeatureCount entries.
double decision_score(const TrainedModel& m, const Eigen::Ref<const VectorXd>& x);

/// Scores for every row of x (n x 30).
VectorXd decision_scores(const TrainedModel& m, const Eigen::Ref<const Matrix<double>>& x);

/// x: any 30-entry vector expression (ternary or real).
template <typename Derived>
Label predict(const TrainedModel& m, const Eigen::MatrixBase<Derived>& x) {
  const VectorXd v = x.template cast<double>();
  return label_from_score(decision_score(m, v));
}
std::vector<Label> predict_all(const TrainedModel& m, const Dataset& d);

/// Throws Error when a family invariant does not hold.
void check_invariants(const TrainedModel& m);

// Shared by training and prediction.
double mlp_forward_logit(const MlpModel& m, const Eigen::Ref<const VectorXd>& x);
double knn_vote(const KnnModel& m, const Eigen::Ref<const VectorXd>& x);

}  // namespace phishml
