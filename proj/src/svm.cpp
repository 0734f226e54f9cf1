#include "phishml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "phishml/error.hpp"

namespace phishml {

namespace {

constexpr double kTau = 1e-12;

/// LRU cache of kernel matrix rows K(., x_i).
class KernelRows {
 public:
  KernelRows(const Matrix<double>& x, const KernelSpec& kernel, std::size_t capacity)
      : x_(x), kernel_(kernel), norms_(x.rowwise().squaredNorm()), capacity_(std::max<std::size_t>(capacity, 2)) {}

  const VectorXd& row(Index i) {
    if (auto it = map_.find(i); it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (map_.size() >= capacity_) {
      map_.erase(lru_.back().first);
      lru_.pop_back();
    }
    VectorXd r = x_ * x_.row(i).transpose();
    for (Index t = 0; t < r.size(); ++t) r(t) = kernel_from_parts(kernel_, r(t), norms_(t) + norms_(i) - 2.0 * r(t));
    lru_.emplace_front(i, std::move(r));
    map_[i] = lru_.begin();
    return lru_.front().second;
  }

  double diagonal(Index i) const { return kernel_from_parts(kernel_, norms_(i), 0.0); }

 private:
  const Matrix<double>& x_;
  KernelSpec kernel_;
  VectorXd norms_;
  std::size_t capacity_;
  std::list<std::pair<Index, VectorXd>> lru_;
  std::unordered_map<Index, std::list<std::pair<Index, VectorXd>>::iterator> map_;
};

}  // namespace

void SvmParams::validate() const {
  kernel.validate();
  if (!(tol > 0.0)) throw SpecError("svm: tol must be positive");
  if (max_passes < 1) throw SpecError("svm: max_passes must be >= 1");
  if (cache_mb < 1) throw SpecError("svm: cache_mb must be >= 1");
}

KernelMachineModel train_svm_smo(const Dataset& train, const SvmParams& params, SvmStatus* status) {
  params.validate();
  const auto counts = train.class_counts();
  if (counts[0] == 0 || counts[1] == 0) throw SpecError("svm: training set must contain both classes");

  const Matrix<double> x = train.design_matrix<double>();
  const VectorXd y = train.label_vector<double>();
  const Index n = x.rows();
  const double C = params.kernel.C;
  const std::size_t row_bytes = static_cast<std::size_t>(n) * sizeof(double) + 64;
  KernelRows kernel(x, params.kernel, static_cast<std::size_t>(params.cache_mb) * 1024 * 1024 / row_bytes);

  VectorXd qd(n);
  for (Index i = 0; i < n; ++i) qd(i) = kernel.diagonal(i);

  VectorXd alpha = VectorXd::Zero(n);
  VectorXd grad = VectorXd::Constant(n, -1.0);  // Q alpha - e
  auto in_up = [&](Index t) { return (y(t) > 0 && alpha(t) < C) || (y(t) < 0 && alpha(t) > 0); };
  auto in_low = [&](Index t) { return (y(t) < 0 && alpha(t) < C) || (y(t) > 0 && alpha(t) > 0); };

  const std::int64_t max_iter = static_cast<std::int64_t>(params.max_passes) * std::max<std::int64_t>(n, 1);
  SvmStatus st;
  for (st.iterations = 0; st.iterations < max_iter; ++st.iterations) {
    Index i = -1, j = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    st.max_violation = (i < 0 || j < 0) ? 0.0 : g_max - g_min;
    if (i < 0 || j < 0 || st.max_violation < params.tol) {
      st.converged = true;
      break;
    }

    const VectorXd& ki = kernel.row(i);
    const double kij = ki(j);
    const double old_ai = alpha(i), old_aj = alpha(j);
    if (y(i) != y(j)) {
      double quad = qd(i) + qd(j) + 2.0 * (y(i) * y(j) * kij);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = C - diff;
        }
      } else if (alpha(j) > C) {
        alpha(j) = C;
        alpha(i) = C + diff;
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * (y(i) * y(j) * kij);
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = sum - C;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > C) {
        if (alpha(j) > C) {
          alpha(j) = C;
          alpha(i) = sum - C;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }

    const double di = (alpha(i) - old_ai) * y(i);
    const double dj = (alpha(j) - old_aj) * y(j);
    // Copy row i's contribution first: fetching row j may evict it.
    grad.array() += y.array() * (di * ki.array());
    const VectorXd& kj = kernel.row(j);
    grad.array() += y.array() * (dj * kj.array());
  }

  // Offset from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  Index n_free = 0;
  for (Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) >= C) {
      if (y(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha(t) <= 0) {
      if (y(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  KernelMachineModel model;
  model.kernel = params.kernel;
  model.bias = -rho;
  const Index n_sv = (alpha.array() > 0).count();
  model.support_vectors.resize(n_sv, kFeatureCount);
  model.alphas.resize(n_sv);
  model.labels.resize(n_sv);
  for (Index t = 0, s = 0; t < n; ++t) {
    if (alpha(t) <= 0) continue;
    model.support_vectors.row(s) = x.row(t);
    model.alphas(s) = alpha(t);
    model.labels(s) = static_cast<std::int8_t>(y(t));
    ++s;
  }
  if (status) *status = st;
  return model;
}

}  // namespace phishml
