#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "phishml/dataset.hpp"
#include "phishml/ensemble.hpp"
#include "phishml/knn.hpp"
#include "phishml/logistic.hpp"
#include "phishml/mlp.hpp"
#include "phishml/models.hpp"
#include "phishml/svm.hpp"
#include "phishml/tree.hpp"

namespace phishml {

/// Order matches the alternatives of Hyperparams.
enum class Family { Logistic, Knn, Svm, Tree, Forest, AdaBoost, GBoost, XgboostLike, Mlp };

using Hyperparams = std::variant<LogisticParams, KnnParams, SvmParams, TreeParams, ForestParams, AdaBoostParams,
                                 GBoostParams, XgbParams, MlpParams>;

std::string_view to_string(Family f) noexcept;
Family family_from_string(std::string_view s);

struct ClassifierSpec {
  Hyperparams hyperparams;
  std::uint64_t seed = 42;
  /// Display name; empty selects a name derived from the family.
  std::string name;

  Family family() const noexcept { return static_cast<Family>(hyperparams.index()); }
  std::string display_name() const;
  void validate() const;

  static ClassifierSpec defaults(Family f, std::uint64_t seed = 42);

  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

/// {"family": ..., "hyperparams": {...}, "seed": n, "name": "..."}. Missing
/// hyperparameters keep their defaults, unknown keys are rejected, and a
/// missing seed takes `default_seed`. Throws SpecError.
ClassifierSpec spec_from_json(const nlohmann::json& j, std::uint64_t default_seed = 42);
ClassifierSpec spec_from_json_text(std::string_view text, std::uint64_t default_seed = 42);
nlohmann::json to_json(const ClassifierSpec& spec);

/// The twelve configurations of the comparison table, in its row order.
std::vector<ClassifierSpec> comparison_battery(std::uint64_t seed = 42);

struct FitResult {
  TrainedModel model;
  bool converged = true;
  std::string warning;
};

/// Train the family selected by `spec`. `jobs` parallelizes forest members.
FitResult fit(const ClassifierSpec& spec, const Dataset& train, int jobs = 1);

}  // namespace phishml
