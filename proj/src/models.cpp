#include "phishml/models.hpp"

#include <cmath>
#include <string>

#include "phishml/error.hpp"
#include "overloaded.hpp"

namespace phishml {

namespace {

using detail::Overloaded;

double kernel_machine_score(const KernelMachineModel& m, const Eigen::Ref<const VectorXd>& x) {
  double s = m.bias;
  for (Index i = 0; i < m.support_vectors.rows(); ++i)
    s += m.alphas(i) * m.labels(i) * kernel_eval(m.kernel, m.support_vectors.row(i).transpose(), x);
  return s;
}

double ensemble_score(const EnsembleModel& m, const Eigen::Ref<const VectorXd>& x) {
  double s = m.aggregation == Aggregation::AdditiveScore ? m.base_score : 0.0;
  for (std::size_t t = 0; t < m.members.size(); ++t) s += m.member_weights[t] * m.members[t].eval(x);
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error("model invariant violated: " + what);
}

void check_tree(const TreeModel& t) {
  require(!t.nodes.empty(), "tree has no nodes");
  const auto n = static_cast<int>(t.nodes.size());
  for (const auto& node : t.nodes) {
    require(node.weight_phishing >= 0.0 && node.weight_legitimate >= 0.0, "negative class weight");
    require(node.weight_phishing + node.weight_legitimate > 0.0, "node with no training weight");
    if (node.is_leaf()) {
      require(std::isfinite(node.value), "non-finite leaf value");
      continue;
    }
    require(node.feature < kFeatureCount, "split feature out of range");
    require(node.left > 0 && node.left < n && node.right > 0 && node.right < n && node.left != node.right,
            "internal node without two children");
  }
}

}  // namespace

std::string_view model_kind(const TrainedModel& m) noexcept {
  return std::visit(Overloaded{
                        [](const LinearModel&) { return std::string_view("linear"); },
                        [](const KnnModel&) { return std::string_view("knn"); },
                        [](const KernelMachineModel&) { return std::string_view("kernel_machine"); },
                        [](const TreeModel&) { return std::string_view("tree"); },
                        [](const EnsembleModel&) { return std::string_view("ensemble"); },
                        [](const MlpModel&) { return std::string_view("mlp"); },
                    },
                    m);
}

double mlp_forward_logit(const MlpModel& m, const Eigen::Ref<const VectorXd>& x) {
  VectorXd a = x;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    VectorXd z = m.weights[l] * a + m.biases[l];
    if (l + 1 == m.weights.size()) return z(0);
    if (m.hidden_activation == Activation::Relu) {
      a = z.cwiseMax(0.0);
    } else {
      a = z.unaryExpr([](double v) { return v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); });
    }
  }
  return 0.0;
}

double decision_score(const TrainedModel& m, const Eigen::Ref<const VectorXd>& x) {
  if (x.size() != kFeatureCount)
    throw SpecError("dimension mismatch: expected " + std::to_string(kFeatureCount) + " features, got " +
                    std::to_string(x.size()));
  return std::visit(Overloaded{
                        [&](const LinearModel& l) { return l.weights.dot(x) + l.bias; },
                        [&](const KnnModel& k) { return knn_vote(k, x); },
                        [&](const KernelMachineModel& k) { return kernel_machine_score(k, x); },
                        [&](const TreeModel& t) { return t.eval(x); },
                        [&](const EnsembleModel& e) { return ensemble_score(e, x); },
                        [&](const MlpModel& n) { return mlp_forward_logit(n, x); },
                    },
                    m);
}

VectorXd decision_scores(const TrainedModel& m, const Eigen::Ref<const Matrix<double>>& x) {
  if (x.cols() != kFeatureCount) throw SpecError("dimension mismatch: expected 30 feature columns");
  if (const auto* lin = std::get_if<LinearModel>(&m)) return (x * lin->weights).array() + lin->bias;
  if (const auto* km = std::get_if<KernelMachineModel>(&m)) {
    const MatrixXd dots = x * km->support_vectors.transpose();
    const VectorXd xn = x.rowwise().squaredNorm();
    const VectorXd sn = km->support_vectors.rowwise().squaredNorm();
    const VectorXd coef = km->alphas.cwiseProduct(km->labels.cast<double>());
    VectorXd out = VectorXd::Constant(x.rows(), km->bias);
    for (Index i = 0; i < x.rows(); ++i)
      for (Index s = 0; s < dots.cols(); ++s)
        out(i) += coef(s) * kernel_from_parts(km->kernel, dots(i, s), xn(i) + sn(s) - 2.0 * dots(i, s));
    return out;
  }
  VectorXd out(x.rows());
  VectorXd row(kFeatureCount);
  for (Index i = 0; i < x.rows(); ++i) {
    row = x.row(i).transpose();
    out(i) = decision_score(m, row);
  }
  return out;
}

std::vector<Label> predict_all(const TrainedModel& m, const Dataset& d) {
  const VectorXd s = decision_scores(m, d.design_matrix<double>());
  std::vector<Label> out(static_cast<std::size_t>(s.size()));
  for (Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = label_from_score(s(i));
  return out;
}

void check_invariants(const TrainedModel& m) {
  std::visit(Overloaded{
                 [](const LinearModel& l) {
                   require(l.weights.size() == kFeatureCount, "linear weights must have 30 entries");
                   require(l.weights.allFinite() && std::isfinite(l.bias), "non-finite linear parameters");
                 },
                 [](const KnnModel& k) {
                   require(k.points.cols() == kFeatureCount, "knn points must have 30 columns");
                   require(k.points.rows() == k.labels.size(), "knn label count");
                   require(k.k >= 1 && k.k <= k.points.rows(), "knn k out of range");
                 },
                 [](const KernelMachineModel& k) {
                   const double C = k.kernel.C;
                   require(k.support_vectors.rows() == k.alphas.size() && k.alphas.size() == k.labels.size(),
                           "support vector arrays differ in length");
                   double balance = 0.0;
                   for (Index i = 0; i < k.alphas.size(); ++i) {
                     require(k.alphas(i) >= 0.0 && k.alphas(i) <= C, "alpha outside [0, C]");
                     require(k.labels(i) == 1 || k.labels(i) == -1, "support vector label");
                     balance += k.alphas(i) * k.labels(i);
                   }
                   require(std::abs(balance) <= 1e-6, "sum of alpha * y is not zero");
                   require(std::isfinite(k.bias), "non-finite bias");
                 },
                 [](const TreeModel& t) { check_tree(t); },
                 [](const EnsembleModel& e) {
                   require(e.members.size() == e.member_weights.size(), "member and weight counts differ");
                   for (double w : e.member_weights) require(std::isfinite(w), "non-finite member weight");
                   for (const auto& t : e.members) check_tree(t);
                   require(std::isfinite(e.base_score), "non-finite base score");
                 },
                 [](const MlpModel& n) {
                   require(n.layer_sizes.size() >= 3, "mlp needs a hidden layer");
                   require(n.layer_sizes.front() == kFeatureCount && n.layer_sizes.back() == 1, "mlp end widths");
                   require(n.weights.size() + 1 == n.layer_sizes.size() && n.biases.size() == n.weights.size(),
                           "mlp layer count");
                   for (std::size_t l = 0; l < n.weights.size(); ++l) {
                     require(n.weights[l].rows() == n.layer_sizes[l + 1] && n.weights[l].cols() == n.layer_sizes[l],
                             "mlp weight shape");
                     require(n.biases[l].size() == n.layer_sizes[l + 1], "mlp bias shape");
                     require(n.weights[l].allFinite() && n.biases[l].allFinite(), "non-finite mlp parameters");
                   }
                 },
             },
             m);
}

}  // namespace phishml
