#include "phishml/mlp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "phishml/error.hpp"
#include "phishml/folds.hpp"
#include "phishml/rng.hpp"

namespace phishml {

namespace {

using Eigen::ArrayXXd;

ArrayXXd activate(const ArrayXXd& z, Activation a) {
  if (a == Activation::Relu) return z.max(0.0);
  return z.unaryExpr([](double v) { return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); });
}

ArrayXXd activate_derivative(const ArrayXXd& z, Activation a) {
  if (a == Activation::Relu) return (z > 0.0).cast<double>();
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// Forward pass keeping pre-activations; returns the output logits (1 x n).
std::vector<MatrixXd> forward(const MlpModel& m, const Eigen::Ref<const MatrixXd>& x, std::vector<MatrixXd>* pre) {
  std::vector<MatrixXd> acts;
  acts.push_back(x.transpose());
  const std::size_t layers = m.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    MatrixXd z = (m.weights[l] * acts.back()).colwise() + m.biases[l];
    if (pre) pre->push_back(z);
    if (l + 1 < layers) acts.push_back(activate(z.array(), m.hidden_activation).matrix());
    else acts.push_back(std::move(z));
  }
  return acts;
}

double data_loss(const MlpModel& m, const Eigen::Ref<const MatrixXd>& x, const VectorXd& y) {
  const auto acts = forward(m, x, nullptr);
  const MatrixXd& z = acts.back();
  double s = 0.0;
  for (Index i = 0; i < z.cols(); ++i) s += softplus(z(0, i)) - (y(i) > 0 ? z(0, i) : 0.0);
  return s / static_cast<double>(z.cols());
}

double penalty(const MlpModel& m, double l2) {
  double s = 0.0;
  for (const auto& w : m.weights) s += w.squaredNorm();
  return 0.5 * l2 * s;
}

}  // namespace

void MlpParams::validate() const {
  if (hidden.empty()) throw SpecError("mlp: at least one hidden layer is required");
  for (int w : hidden)
    if (w < 1) throw SpecError("mlp: hidden layer widths must be >= 1");
  if (epochs < 0) throw SpecError("mlp: epochs must be >= 0");
  if (batch_size < 1) throw SpecError("mlp: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw SpecError("mlp: learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw SpecError("mlp: betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw SpecError("mlp: epsilon must be positive");
  if (!(l2 >= 0.0)) throw SpecError("mlp: l2 must be non-negative");
  if (patience < 1) throw SpecError("mlp: patience must be >= 1");
  if (!(tol >= 0.0)) throw SpecError("mlp: tol must be non-negative");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw SpecError("mlp: validation_fraction must lie in (0, 1)");
}

MlpGradient mlp_loss_and_gradient(const MlpModel& m, const Eigen::Ref<const MatrixXd>& x, const VectorXd& y,
                                  double l2) {
  std::vector<MatrixXd> pre;
  const auto acts = forward(m, x, &pre);
  const auto n = static_cast<double>(x.rows());
  const MatrixXd& z = acts.back();

  MlpGradient g;
  g.loss = penalty(m, l2);
  MatrixXd delta(1, z.cols());
  for (Index i = 0; i < z.cols(); ++i) {
    const double t = y(i) > 0 ? 1.0 : 0.0;
    g.loss += (softplus(z(0, i)) - t * z(0, i)) / n;
    delta(0, i) = (1.0 / (1.0 + std::exp(-z(0, i))) - t) / n;
  }

  const std::size_t layers = m.weights.size();
  g.weights.resize(layers);
  g.biases.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l] = delta * acts[l].transpose() + l2 * m.weights[l];
    g.biases[l] = delta.rowwise().sum();
    if (l > 0)
      delta = ((m.weights[l].transpose() * delta).array() * activate_derivative(pre[l - 1].array(), m.hidden_activation))
                  .matrix();
  }
  return g;
}

MlpModel init_mlp(const std::vector<int>& hidden, Activation activation, std::uint64_t seed) {
  Rng rng(seed);
  MlpModel m;
  m.hidden_activation = activation;
  m.layer_sizes.push_back(kFeatureCount);
  m.layer_sizes.insert(m.layer_sizes.end(), hidden.begin(), hidden.end());
  m.layer_sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const int in = m.layer_sizes[l], out = m.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (in + out));
    MatrixXd w(out, in);
    for (Index r = 0; r < out; ++r)
      for (Index c = 0; c < in; ++c) w(r, c) = rng.uniform(-bound, bound);
    VectorXd b(out);
    for (Index r = 0; r < out; ++r) b(r) = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  return m;
}

MlpModel train_mlp(const Dataset& train, const MlpParams& params, std::uint64_t seed, MlpTrace* trace) {
  params.validate();
  if (train.empty()) throw SpecError("mlp: empty training set");

  const auto counts = train.class_counts();
  const bool carve = train.size() >= 20 && counts[0] >= 2 && counts[1] >= 2;
  Dataset fit_set = train, val_set;
  if (carve) std::tie(fit_set, val_set) = holdout_split(train, params.validation_fraction, derive_seed(seed, 1));

  const MatrixXd x = fit_set.design_matrix<double>();
  const VectorXd y = fit_set.label_vector<double>();
  const MatrixXd xv = val_set.design_matrix<double>();
  const VectorXd yv = val_set.label_vector<double>();

  MlpModel model = init_mlp(params.hidden, params.activation, derive_seed(seed, 2));
  MlpModel best = model;
  Rng rng(derive_seed(seed, 3));

  const std::size_t layers = model.weights.size();
  std::vector<MatrixXd> mw(layers), vw(layers);
  std::vector<VectorXd> mb(layers), vb(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    mw[l] = vw[l] = MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols());
    mb[l] = vb[l] = VectorXd::Zero(model.biases[l].size());
  }

  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  const auto batch = std::min<std::size_t>(static_cast<std::size_t>(params.batch_size), order.size());
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  long long step = 0;
  MatrixXd xb;
  VectorXd yb;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<Index>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      xb.resize(static_cast<Index>(len), x.cols());
      yb.resize(static_cast<Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        xb.row(static_cast<Index>(i)) = x.row(order[start + i]);
        yb(static_cast<Index>(i)) = y(order[start + i]);
      }
      const MlpGradient g = mlp_loss_and_gradient(model, xb, yb, params.l2);
      if (!std::isfinite(g.loss))
        throw TrainingError("mlp: loss became non-finite in epoch " + std::to_string(epoch));
      epoch_loss += g.loss * static_cast<double>(len);

      ++step;
      const double c1 = 1.0 - std::pow(params.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(params.beta2, static_cast<double>(step));
      const double rate = params.learning_rate * std::sqrt(c2) / c1;
      for (std::size_t l = 0; l < layers; ++l) {
        mw[l] = params.beta1 * mw[l] + (1.0 - params.beta1) * g.weights[l];
        vw[l] = params.beta2 * vw[l] + (1.0 - params.beta2) * g.weights[l].cwiseAbs2();
        model.weights[l].array() -= rate * mw[l].array() / (vw[l].array().sqrt() + params.epsilon);
        mb[l] = params.beta1 * mb[l] + (1.0 - params.beta1) * g.biases[l];
        vb[l] = params.beta2 * vb[l] + (1.0 - params.beta2) * g.biases[l].cwiseAbs2();
        model.biases[l].array() -= rate * mb[l].array() / (vb[l].array().sqrt() + params.epsilon);
      }
    }
    epoch_loss /= static_cast<double>(order.size());
    if (trace) trace->train_loss.push_back(epoch_loss);

    const double monitored = carve ? data_loss(model, xv, yv) : epoch_loss;
    if (carve && trace) trace->validation_loss.push_back(monitored);
    if (!std::isfinite(monitored)) throw TrainingError("mlp: validation loss became non-finite");
    stale = monitored > best_loss - params.tol ? stale + 1 : 0;
    if (monitored < best_loss) {
      best_loss = monitored;
      best = model;
      if (trace) trace->best_epoch = epoch;
    }
    if (stale >= params.patience) {
      if (trace) trace->stopped_early = true;
      break;
    }
  }
  return params.epochs == 0 ? model : best;
}

}  // namespace phishml
