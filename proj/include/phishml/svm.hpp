#pragma once

#include <cstdint>

#include "phishml/dataset.hpp"
#include "phishml/kernels.hpp"
#include "phishml/models.hpp"

namespace phishml {

struct SvmParams {
  KernelSpec kernel;
  double tol = 1e-3;
  /// Iteration cap, in units of one sweep's worth (n) of pair updates.
  int max_passes = 10000;
  int cache_mb = 256;

  void validate() const;
  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

struct SvmStatus {
  bool converged = false;
  std::int64_t iterations = 0;
  double max_violation = 0.0;  // m(alpha) - M(alpha) at exit
};

/// Soft-margin C-SVM dual solved by SMO with maximal-violating-pair working
/// set selection. Only samples with alpha > 0 are kept in the model.
KernelMachineModel train_svm_smo(const Dataset& train, const SvmParams& params = {}, SvmStatus* status = nullptr);

}  // namespace phishml
