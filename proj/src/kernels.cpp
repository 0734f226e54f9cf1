#include "phishml/kernels.hpp"

#include <string>

namespace phishml {

std::string_view to_string(KernelKind k) noexcept {
  switch (k) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Sigmoid: return "sigmoid";
    case KernelKind::Polynomial: return "poly";
  }
  return "?";
}

KernelKind kernel_kind_from_string(std::string_view s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  if (s == "sigmoid") return KernelKind::Sigmoid;
  if (s == "poly" || s == "polynomial") return KernelKind::Polynomial;
  throw SpecError("unknown kernel '" + std::string(s) + "' (expected linear, rbf, sigmoid or poly)");
}

}  // namespace phishml
