#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phishml/schema.hpp"

namespace phishml {

using Index = Eigen::Index;
using FeatureMatrix = Eigen::Matrix<Ternary, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>;
using LabelVector = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct LabeledSample {
  FeatureVector features;
  Label label;
};

/// Immutable labeled dataset. Rows are samples in source order.
class Dataset {
 public:
  Dataset() : Dataset(FeatureSchema::canonical(), FeatureMatrix(0, kFeatureCount), LabelVector(0), "") {}
  /// Validates every cell against the schema domains and every label.
  Dataset(FeatureSchema schema, FeatureMatrix features, LabelVector labels, std::string provenance);

  static Dataset from_samples(std::span<const LabeledSample> samples, std::string provenance = "",
                              const FeatureSchema& schema = FeatureSchema::canonical());

  const FeatureSchema& schema() const noexcept { return schema_; }
  const FeatureMatrix& features() const noexcept { return features_; }
  const LabelVector& labels() const noexcept { return labels_; }
  const std::string& provenance() const noexcept { return provenance_; }

  Index size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return size() == 0; }
  Label label(Index i) const { return static_cast<Label>(labels_(i)); }
  LabeledSample sample(Index i) const { return {features_.row(i).transpose(), label(i)}; }

  /// {phishing count, legitimate count}.
  std::array<Index, 2> class_counts() const;

  /// Rows selected by `rows`, in that order.
  Dataset subset(std::span<const Index> rows) const;

  /// Features converted to Scalar (n x 30, row-major).
  template <typename Scalar>
  Matrix<Scalar> design_matrix() const {
    return features_.template cast<Scalar>();
  }

  /// Labels as +-1 in Scalar.
  template <typename Scalar>
  Vector<Scalar> label_vector() const {
    return labels_.template cast<Scalar>();
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.schema_ == b.schema_ && a.features_ == b.features_ && a.labels_ == b.labels_;
  }

 private:
  FeatureSchema schema_;
  FeatureMatrix features_;
  LabelVector labels_;
  std::string provenance_;
};

/// Parse a dataset CSV. `source` names the stream in error messages.
Dataset parse_csv(std::istream& in, const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Dataset& d);
void save_csv(const std::filesystem::path& path, const Dataset& d);

struct ColumnStats {
  std::string name;
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and sample standard deviation (divisor n-1; a single sample has
/// std 0) for all features followed by the label column.
std::vector<ColumnStats> summarize(const Dataset& d);

/// Concatenate two datasets with the same schema.
Dataset concat(const Dataset& a, const Dataset& b, std::string provenance = "");

}  // namespace phishml
