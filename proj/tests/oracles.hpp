#pragma once

// Brute-force reference implementations the library is checked against.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phishml/dataset.hpp"
#include "phishml/folds.hpp"
#include "phishml/metrics.hpp"

namespace phishml::oracle {

struct Recount {
  long ll = 0, lp = 0, pl = 0, pp = 0;
};

inline Recount recount(const std::vector<int>& pred, const std::vector<int>& truth) {
  Recount r;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == 1 && pred[i] == 1) ++r.ll;
    if (truth[i] == 1 && pred[i] == -1) ++r.lp;
    if (truth[i] == -1 && pred[i] == 1) ++r.pl;
    if (truth[i] == -1 && pred[i] == -1) ++r.pp;
  }
  return r;
}

/// Empty string when `m` agrees with the textbook ratios of `r`.
inline std::string check_metrics(const Recount& r, const MetricsReport& m, double tol = 1e-12) {
  const double total = static_cast<double>(r.ll + r.lp + r.pl + r.pp);
  if (std::abs(m.accuracy - (r.ll + r.pp) / total) > tol) return "accuracy";
  const bool recall_def = r.pl + r.pp > 0;
  const bool precision_def = r.lp + r.pp > 0;
  if (m.recall.defined() != recall_def) return "recall definedness";
  if (m.precision.defined() != precision_def) return "precision definedness";
  if (recall_def && std::abs(*m.recall.value - double(r.pp) / double(r.pl + r.pp)) > tol) return "recall";
  if (precision_def && std::abs(*m.precision.value - double(r.pp) / double(r.lp + r.pp)) > tol) return "precision";
  if (recall_def && precision_def) {
    const double p = *m.precision.value, rc = *m.recall.value;
    if (p + rc > 0) {
      if (!m.f1.defined()) return "f1 undefined although p + r > 0";
      if (std::abs(*m.f1.value - 2 * p * rc / (p + rc)) > tol) return "f1 identity";
      if (std::abs(*m.f1.value - 2.0 * r.pp / (2.0 * r.pp + r.pl + r.lp)) > tol) return "f1 count form";
    } else if (m.f1.defined()) {
      return "f1 defined although p + r = 0";
    }
  } else if (m.f1.defined()) {
    return "f1 defined without p and r";
  }
  return {};
}

/// Empty string when `plan` partitions `d` into k stratified folds.
inline std::string check_fold_plan(const Dataset& d, const FoldPlan& plan, int k) {
  if (plan.k != k) return "k";
  if (static_cast<Index>(plan.assignments.size()) != d.size()) return "assignment count";
  std::vector<int> seen(static_cast<std::size_t>(d.size()), 0);
  std::vector<std::array<Index, 2>> per_class(static_cast<std::size_t>(k), {0, 0});
  for (int f = 0; f < k; ++f) {
    const auto test = plan.test_indices(f);
    const auto train = plan.train_indices(f);
    if (static_cast<Index>(test.size() + train.size()) != d.size()) return "train + test size";
    std::vector<int> mark(static_cast<std::size_t>(d.size()), 0);
    for (Index i : test) {
      ++seen[static_cast<std::size_t>(i)];
      ++mark[static_cast<std::size_t>(i)];
      ++per_class[static_cast<std::size_t>(f)][d.label(i) == Label::Legitimate ? 1 : 0];
    }
    for (Index i : train)
      if (mark[static_cast<std::size_t>(i)]++ != 0) return "train overlaps test";
    if (std::any_of(mark.begin(), mark.end(), [](int m) { return m != 1; })) return "fold does not cover data";
  }
  if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) return "not a partition";
  for (int c = 0; c < 2; ++c) {
    Index lo = per_class[0][c], hi = lo;
    for (const auto& pc : per_class) {
      lo = std::min(lo, pc[c]);
      hi = std::max(hi, pc[c]);
    }
    if (hi - lo > 1) return "class " + std::to_string(c) + " spread " + std::to_string(hi - lo);
  }
  Index lo = d.size(), hi = 0;
  for (const auto& pc : per_class) {
    lo = std::min(lo, pc[0] + pc[1]);
    hi = std::max(hi, pc[0] + pc[1]);
  }
  if (hi - lo > 1) return "fold size spread";
  return {};
}

struct GiniSplit {
  int feature = -1;
  std::vector<bool> goes_left;
  double gain = 0.0;
};

inline double gini(double neg, double pos) {
  const double w = neg + pos;
  if (w == 0) return 0.0;
  return 1.0 - (neg / w) * (neg / w) - (pos / w) * (pos / w);
}

/// Every binary partition of every feature by a value cut, best first.
/// Ties are broken by (feature, cut) ascending.
inline std::vector<GiniSplit> enumerate_gini_splits(const Dataset& d) {
  std::vector<GiniSplit> out;
  double neg = 0, pos = 0;
  for (Index i = 0; i < d.size(); ++i) (d.labels()(i) > 0 ? pos : neg) += 1;
  for (int f = 0; f < kFeatureCount; ++f) {
    for (double cut : {-0.5, 0.5}) {
      GiniSplit s;
      s.feature = f;
      double ln = 0, lp = 0, rn = 0, rp = 0;
      for (Index i = 0; i < d.size(); ++i) {
        const bool left = d.features()(i, f) <= cut;
        s.goes_left.push_back(left);
        (left ? (d.labels()(i) > 0 ? lp : ln) : (d.labels()(i) > 0 ? rp : rn)) += 1;
      }
      if (ln + lp == 0 || rn + rp == 0) continue;
      const double n = neg + pos;
      s.gain = gini(neg, pos) - (ln + lp) / n * gini(ln, lp) - (rn + rp) / n * gini(rn, rp);
      // The same partition can arise from both cuts; keep the first.
      const bool dup = std::any_of(out.begin(), out.end(), [&](const GiniSplit& o) {
        return o.feature == f && o.goes_left == s.goes_left;
      });
      if (!dup) out.push_back(std::move(s));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const GiniSplit& a, const GiniSplit& b) { return a.gain > b.gain; });
  return out;
}

/// Majority label of the k nearest rows by a full sort on (distance, index);
/// a tied vote goes to +1.
inline int knn_brute(const Dataset& train, const Eigen::VectorXd& q, int k, bool manhattan = false) {
  std::vector<std::pair<double, Index>> dist;
  for (Index i = 0; i < train.size(); ++i) {
    const Eigen::VectorXd diff = train.features().row(i).transpose().cast<double>() - q;
    dist.emplace_back(manhattan ? diff.cwiseAbs().sum() : diff.squaredNorm(), i);
  }
  std::sort(dist.begin(), dist.end());
  int vote = 0;
  for (int j = 0; j < k; ++j) vote += train.labels()(dist[static_cast<std::size_t>(j)].second);
  return vote >= 0 ? 1 : -1;
}

/// Central differences of f at x, one coordinate at a time.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                        double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    g(i) = (up - down) / (2 * h);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

}  // namespace phishml::oracle
