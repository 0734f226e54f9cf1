#include "phishml/knn.hpp"

#include <algorithm>
#include <numeric>

#include "phishml/error.hpp"

namespace phishml {

void KnnParams::validate() const {
  if (k < 1) throw SpecError("knn: k must be >= 1");
}

KnnModel train_knn(const Dataset& train, const KnnParams& params) {
  params.validate();
  if (train.empty()) throw SpecError("knn: empty training set");
  if (params.k > train.size()) throw SpecError("knn: k exceeds the number of training samples");
  KnnModel m;
  m.points = train.design_matrix<double>();
  m.squared_norms = m.points.rowwise().squaredNorm();
  m.labels = train.labels();
  m.k = params.k;
  m.metric = params.metric;
  return m;
}

double knn_vote(const KnnModel& m, const Eigen::Ref<const VectorXd>& x) {
  const Index n = m.points.rows();
  VectorXd dist;
  if (m.metric == DistanceMetric::Euclidean) {
    // Squared distances; exact for integer-valued features.
    dist = (m.squared_norms - 2.0 * (m.points * x)).array() + x.squaredNorm();
  } else {
    dist = (m.points.rowwise() - x.transpose()).cwiseAbs().rowwise().sum();
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto k = static_cast<std::ptrdiff_t>(m.k);
  auto closer = [&dist](Index a, Index b) { return dist(a) < dist(b) || (dist(a) == dist(b) && a < b); };
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), closer);
  double vote = 0.0;
  for (std::ptrdiff_t i = 0; i < k; ++i) vote += m.labels(order[static_cast<std::size_t>(i)]);
  return vote;
}

Label knn_predict(const Dataset& train, const FeatureVector& x, int k, DistanceMetric metric) {
  const KnnModel m = train_knn(train, {k, metric});
  return label_from_score(knn_vote(m, x.cast<double>()));
}

}  // namespace phishml
