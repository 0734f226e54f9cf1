#pragma once

#include <cstdint>
#include <vector>

#include "phishml/dataset.hpp"
#include "phishml/models.hpp"

namespace phishml {

struct MlpParams {
  std::vector<int> hidden = {30};
  Activation activation = Activation::Relu;
  int epochs = 500;
  int batch_size = 200;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l2 = 1e-4;
  int patience = 10;
  double tol = 1e-4;
  double validation_fraction = 0.1;

  void validate() const;
  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

struct MlpTrace {
  std::vector<double> train_loss;       // per epoch
  std::vector<double> validation_loss;  // per epoch; empty when no carve-out was possible
  int best_epoch = -1;
  bool stopped_early = false;
};

struct MlpGradient {
  double loss = 0.0;
  std::vector<MatrixXd> weights;
  std::vector<VectorXd> biases;
};

/// Mean binary cross-entropy of P(legitimate) over the rows of x plus
/// (l2 / 2) times the squared Frobenius norm of every weight matrix, with
/// its backpropagated gradient. x is n x 30, y holds +-1 labels.
MlpGradient mlp_loss_and_gradient(const MlpModel& m, const Eigen::Ref<const MatrixXd>& x, const VectorXd& y,
                                  double l2);

/// Glorot-uniform initialization for the given hidden widths.
MlpModel init_mlp(const std::vector<int>& hidden, Activation activation, std::uint64_t seed);

/// Mini-batch Adam on binary cross-entropy. A stratified validation share
/// of the training set drives early stopping and the best-validation
/// parameters are returned; sets too small to split monitor training loss.
/// Throws TrainingError on a non-finite loss.
MlpModel train_mlp(const Dataset& train, const MlpParams& params = {}, std::uint64_t seed = 42,
                   MlpTrace* trace = nullptr);

}  // namespace phishml
