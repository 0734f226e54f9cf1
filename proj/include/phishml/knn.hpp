#pragma once

#include "phishml/dataset.hpp"
#include "phishml/models.hpp"

namespace phishml {

struct KnnParams {
  int k = 5;
  DistanceMetric metric = DistanceMetric::Euclidean;

  void validate() const;
  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

/// Stores the training set; k must not exceed its size.
KnnModel train_knn(const Dataset& train, const KnnParams& params = {});

/// Majority label among the k nearest training points. Equal distances are
/// ordered by training index; a tied vote predicts legitimate.
Label knn_predict(const Dataset& train, const FeatureVector& x, int k,
                  DistanceMetric metric = DistanceMetric::Euclidean);

}  // namespace phishml
