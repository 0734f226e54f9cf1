#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phishml/dataset.hpp"
#include "phishml/mlp.hpp"
#include "phishml/rng.hpp"

namespace phishml::test {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(PHISHML_FIXTURES) / rel; }

/// Random dataset over the canonical schema. Each feature agrees with the
/// label with probability `signal`, otherwise it is drawn from its domain.
inline Dataset random_dataset(Index n, std::uint64_t seed, double signal = 0.3, double p_legit = 0.5) {
  Rng rng(seed);
  const auto& schema = FeatureSchema::canonical();
  FeatureMatrix x(n, kFeatureCount);
  LabelVector y(n);
  for (Index i = 0; i < n; ++i) {
    const std::int8_t label = rng.uniform01() < p_legit ? 1 : -1;
    y(i) = label;
    for (int f = 0; f < kFeatureCount; ++f) {
      const ValueDomain d = schema.domain(f);
      std::vector<std::int8_t> values;
      if (d.minus_one) values.push_back(-1);
      if (d.zero) values.push_back(0);
      if (d.plus_one) values.push_back(1);
      x(i, f) = rng.uniform01() < signal ? label : values[rng.uniform_index(values.size())];
    }
  }
  return Dataset(schema, std::move(x), std::move(y), "random");
}

/// Dataset from rows written as {features..., label}; features beyond the
/// given prefix are 1.
inline Dataset make_dataset(const std::vector<std::vector<int>>& rows) {
  FeatureMatrix x = FeatureMatrix::Ones(static_cast<Index>(rows.size()), kFeatureCount);
  LabelVector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (std::size_t f = 0; f + 1 < r.size(); ++f) x(static_cast<Index>(i), static_cast<Index>(f)) = static_cast<std::int8_t>(r[f]);
    y(static_cast<Index>(i)) = static_cast<std::int8_t>(r.back());
  }
  return Dataset(FeatureSchema::canonical(), std::move(x), std::move(y), "inline");
}

/// All MLP parameters as one vector, layer by layer, weights before biases.
inline VectorXd flatten(const MlpModel& m) {
  Index n = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l) n += m.weights[l].size() + m.biases[l].size();
  VectorXd out(n);
  Index at = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    out.segment(at, m.weights[l].size()) = m.weights[l].reshaped();
    at += m.weights[l].size();
    out.segment(at, m.biases[l].size()) = m.biases[l];
    at += m.biases[l].size();
  }
  return out;
}

inline MlpModel unflatten(MlpModel m, const VectorXd& theta) {
  Index at = 0;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    m.weights[l].reshaped() = theta.segment(at, m.weights[l].size());
    at += m.weights[l].size();
    m.biases[l] = theta.segment(at, m.biases[l].size());
    at += m.biases[l].size();
  }
  return m;
}

inline VectorXd flatten(const MlpGradient& g) {
  MlpModel shape;
  shape.weights = g.weights;
  shape.biases = g.biases;
  return flatten(shape);
}

}  // namespace phishml::test
