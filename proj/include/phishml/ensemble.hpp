#pragma once

#include <cstdint>
#include <vector>

#include "phishml/dataset.hpp"
#include "phishml/models.hpp"
#include "phishml/tree.hpp"

namespace phishml {

struct ForestParams {
  int n_trees = 100;
  int max_features = 5;  // features drawn per split
  bool bootstrap = true;
  TreeParams tree;       // max_features here is ignored

  void validate() const;
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// Bagged CART trees with per-split feature sampling, combined by majority
/// vote. Tree t uses seed derive_seed(seed, t). `jobs` > 1 trains trees
/// concurrently; the result does not depend on it.
EnsembleModel train_forest(const Dataset& train, const ForestParams& params = {}, std::uint64_t seed = 42,
                           int jobs = 1);

struct AdaBoostParams {
  int n_rounds = 100;
  int stump_depth = 1;

  void validate() const;
  friend bool operator==(const AdaBoostParams&, const AdaBoostParams&) = default;
};

struct AdaBoostTrace {
  std::vector<double> errors;       // weighted error of each accepted member
  std::vector<double> weight_sums;  // sum of sample weights after each round's update
  std::vector<std::vector<double>> weights;
};

/// Discrete AdaBoost over weighted-Gini trees of depth `stump_depth`.
/// Stops early when a member has weighted error >= 0.5 (TrainingError if
/// that happens in the first round) or error 0 (kept with alpha computed
/// at error 1e-10).
EnsembleModel train_adaboost(const Dataset& train, const AdaBoostParams& params = {}, AdaBoostTrace* trace = nullptr);

struct GBoostParams {
  int n_rounds = 200;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_leaf = 1;

  void validate() const;
  friend bool operator==(const GBoostParams&, const GBoostParams&) = default;
};

struct BoostTrace {
  std::vector<double> loss;  // mean training log-loss, starting with the constant model
  int halvings = 0;
};

/// Gradient boosting on the logistic loss. Each round fits a squared-error
/// regression tree to the residuals t - p; leaves take one Newton step
/// sum(r) / sum(p(1-p)). A round that would raise the training loss has
/// its leaf values halved until it does not.
EnsembleModel train_gboost(const Dataset& train, const GBoostParams& params = {}, BoostTrace* trace = nullptr);

struct XgbParams {
  int n_rounds = 200;
  double learning_rate = 0.1;
  int max_depth = 3;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  double subsample = 1.0;
  double colsample = 1.0;

  void validate() const;
  friend bool operator==(const XgbParams&, const XgbParams&) = default;
};

/// Second-order boosting with exact greedy splits: leaf weight -G/(H+lambda),
/// split gain 1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma.
EnsembleModel train_xgboost_like(const Dataset& train, const XgbParams& params = {}, std::uint64_t seed = 42,
                                 BoostTrace* trace = nullptr);

/// Mean logistic loss of additive scores f against +-1 labels.
double mean_log_loss(const VectorXd& f, const LabelVector& y);

}  // namespace phishml
