#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phishml/classifier.hpp"
#include "phishml/dataset.hpp"
#include "phishml/folds.hpp"
#include "phishml/metrics.hpp"

namespace phishml {

struct FoldResult {
  int fold = 0;
  ConfusionCounts counts;
  MetricsReport metrics;  // includes this fold's train and test times
  bool converged = true;
  std::string warning;

  friend bool operator==(const FoldResult&, const FoldResult&) = default;
};

struct CrossValReport {
  std::string name;
  std::optional<ClassifierSpec> spec;  // absent for ad-hoc learners
  int k = 0;
  std::uint64_t seed = 0;
  std::uint64_t fold_plan_hash = 0;
  std::vector<FoldResult> per_fold;
  ConfusionCounts pooled;
  /// Metrics of the pooled counts; times are per-fold means.
  MetricsReport aggregate;

  bool converged() const;
  friend bool operator==(const CrossValReport&, const CrossValReport&) = default;
};

using PredictFn = std::function<std::vector<Label>(const Dataset& test)>;
using LearnerFn = std::function<PredictFn(const Dataset& train)>;

/// Train on k-1 folds and evaluate on the held-out one, for every fold of
/// `plan`. Up to `jobs` folds run concurrently; results do not depend on
/// `jobs` apart from timings.
CrossValReport cross_validate(const Dataset& d, const ClassifierSpec& spec, const FoldPlan& plan, int jobs = 1);
CrossValReport cross_validate(const Dataset& d, const ClassifierSpec& spec, int k, std::uint64_t seed, int jobs = 1);
CrossValReport cross_validate(const Dataset& d, const LearnerFn& learner, std::string name, const FoldPlan& plan,
                              int jobs = 1);

struct SweepResult {
  std::string axis_name;
  std::vector<std::string> axis_values;
  std::vector<CrossValReport> reports;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// Sweep axes: "svm-kernel" (linear, poly, rbf, sigmoid), "knn-k" (positive
/// integers), "mlp-depth" (hidden layer count, each as wide as the base
/// spec's first hidden layer).
std::vector<std::string> sweep_axes();
std::vector<std::string> default_axis_values(const std::string& axis);
ClassifierSpec apply_axis(const ClassifierSpec& base, const std::string& axis, const std::string& value);

/// One cross-validation per axis value, all on the same FoldPlan.
SweepResult sweep(const Dataset& d, const ClassifierSpec& base, const std::string& axis,
                  const std::vector<std::string>& values, int k, std::uint64_t seed, int jobs = 1);

/// Pearson correlations among the 30 features and the label (31 x 31).
/// Pairs involving a zero-variance column are NaN, including its diagonal.
Eigen::MatrixXd correlation_matrix(const Dataset& d);

}  // namespace phishml
