#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "phishml/error.hpp"

namespace phishml {

enum class KernelKind { Linear, Rbf, Sigmoid, Polynomial };

std::string_view to_string(KernelKind k) noexcept;
KernelKind kernel_kind_from_string(std::string_view s);

/// Kernel choice plus the SVM box constraint C.
struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double C = 1.0;
  double gamma = 1.0 / 30.0;
  double coef0 = 0.0;  // r in tanh(gamma <a,b> + r) and (gamma <a,b> + r)^d
  int degree = 3;

  void validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) throw SpecError("kernel: C must be positive");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw SpecError("kernel: gamma must be positive");
    if (!std::isfinite(coef0)) throw SpecError("kernel: coef0 must be finite");
    if (kind == KernelKind::Polynomial && degree < 1) throw SpecError("kernel: degree must be >= 1");
  }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Kernel value from the inner product and squared distance of two points.
inline double kernel_from_parts(const KernelSpec& k, double dot, double squared_distance) {
  switch (k.kind) {
    case KernelKind::Linear: return dot;
    case KernelKind::Rbf: return std::exp(-k.gamma * squared_distance);
    case KernelKind::Sigmoid: return std::tanh(k.gamma * dot + k.coef0);
    case KernelKind::Polynomial: return std::pow(k.gamma * dot + k.coef0, k.degree);
  }
  return 0.0;
}

template <typename DerivedA, typename DerivedB>
double kernel_eval(const KernelSpec& k, const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw SpecError("kernel_eval: dimension mismatch");
  const auto av = a.template cast<double>();
  const auto bv = b.template cast<double>();
  const double dot = av.dot(bv);
  const double sq = k.kind == KernelKind::Rbf ? (av - bv).squaredNorm() : 0.0;
  return kernel_from_parts(k, dot, sq);
}

}  // namespace phishml
