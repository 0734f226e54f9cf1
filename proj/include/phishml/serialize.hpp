#pragma once

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "phishml/classifier.hpp"
#include "phishml/models.hpp"

namespace phishml {

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
  TrainedModel model;
  std::optional<ClassifierSpec> spec;
};

/// Versioned JSON for a trained model. Trees are nested node objects;
/// ensembles hold member arrays; kernel machines store support vectors,
/// alphas and the kernel; MLPs store their layer matrices row by row.
nlohmann::json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const TrainedModel& m, const ClassifierSpec* spec = nullptr);
/// Throws Error naming the parse location or the offending field.
ModelFile load_model(const std::filesystem::path& path);
ModelFile parse_model(std::string_view text);

}  // namespace phishml
