#include "phishml/logistic.hpp"

#include <cmath>

#include "phishml/error.hpp"

namespace phishml {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

void LogisticParams::validate() const {
  if (!(learning_rate > 0.0)) throw SpecError("logistic: learning_rate must be positive");
  if (iterations < 0) throw SpecError("logistic: iterations must be non-negative");
  if (!(l2 >= 0.0)) throw SpecError("logistic: l2 must be non-negative");
}

template <typename Scalar>
LossAndGradient logistic_objective(const LinearModel& model, const Matrix<Scalar>& x, const Vector<Scalar>& y,
                                   double l2) {
  const auto n = static_cast<double>(x.rows());
  const VectorXd z = (x.template cast<double>() * model.weights).array() + model.bias;
  const VectorXd t = (y.template cast<double>().array() + 1.0) * 0.5;  // 1 = legitimate
  double loss = 0.0;
  VectorXd residual(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    // -[t log s(z) + (1 - t) log(1 - s(z))] = softplus(z) - t z
    loss += softplus(z(i)) - t(i) * z(i);
    residual(i) = 1.0 / (1.0 + std::exp(-z(i))) - t(i);
  }
  LossAndGradient out;
  out.loss = loss / n + 0.5 * l2 * model.weights.squaredNorm();
  out.grad_weights = x.template cast<double>().transpose() * residual / n + l2 * model.weights;
  out.grad_bias = residual.sum() / n;
  return out;
}

template LossAndGradient logistic_objective<double>(const LinearModel&, const Matrix<double>&, const Vector<double>&,
                                                    double);

LinearModel train_logistic(const Dataset& train, const LogisticParams& params, LogisticTrace* trace) {
  params.validate();
  if (train.empty()) throw SpecError("logistic: empty training set");
  const Matrix<double> x = train.design_matrix<double>();
  const Vector<double> y = train.label_vector<double>();

  LinearModel model;
  auto current = logistic_objective(model, x, y, params.l2);
  if (trace) trace->loss.push_back(current.loss);
  double rate = params.learning_rate;
  for (int it = 0; it < params.iterations; ++it) {
    LinearModel candidate = model;
    candidate.weights -= rate * current.grad_weights;
    candidate.bias -= rate * current.grad_bias;
    auto next = logistic_objective(candidate, x, y, params.l2);
    if (!std::isfinite(next.loss))
      throw TrainingError("logistic: objective became non-finite at iteration " + std::to_string(it));
    if (next.loss > current.loss) {
      rate *= 0.5;
      if (trace) ++trace->rejected_steps;
      if (rate < 1e-12 * params.learning_rate) break;
      continue;
    }
    model = std::move(candidate);
    current = std::move(next);
    if (trace) trace->loss.push_back(current.loss);
  }
  return model;
}

}  // namespace phishml
