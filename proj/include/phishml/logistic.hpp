#pragma once

#include <vector>

#include "phishml/dataset.hpp"
#include "phishml/models.hpp"

namespace phishml {

struct LogisticParams {
  double learning_rate = 0.1;
  int iterations = 2000;
  double l2 = 1e-4;

  void validate() const;
  friend bool operator==(const LogisticParams&, const LogisticParams&) = default;
};

struct LossAndGradient {
  double loss = 0.0;
  VectorXd grad_weights;
  double grad_bias = 0.0;
};

/// Mean negative log-likelihood of P(legitimate) = sigmoid(x.w + b) plus
/// (l2 / 2) ||w||^2, with its exact gradient.
template <typename Scalar>
LossAndGradient logistic_objective(const LinearModel& model, const Matrix<Scalar>& x, const Vector<Scalar>& y,
                                   double l2);

struct LogisticTrace {
  std::vector<double> loss;  // objective after each accepted step, starting with the initial model
  int rejected_steps = 0;
};

/// Full-batch gradient descent from zero weights. A step that would raise
/// the objective is rejected and retried at half the rate, so the recorded
/// objective never increases. Throws TrainingError on a non-finite loss.
LinearModel train_logistic(const Dataset& train, const LogisticParams& params = {}, LogisticTrace* trace = nullptr);

}  // namespace phishml
