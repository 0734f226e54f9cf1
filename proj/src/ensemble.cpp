#include "phishml/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <numeric>
#include <thread>

#include "phishml/error.hpp"
#include "phishml/rng.hpp"
#include "tree_builder.hpp"

namespace phishml {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<Index> all_rows(const Dataset& d) {
  std::vector<Index> rows(static_cast<std::size_t>(d.size()));
  std::iota(rows.begin(), rows.end(), Index{0});
  return rows;
}

void require_both_classes(const Dataset& d, const char* who) {
  const auto c = d.class_counts();
  if (c[0] == 0 || c[1] == 0) throw SpecError(std::string(who) + ": training set must contain both classes");
}

VectorXd tree_outputs(const TreeModel& tree, const FeatureMatrix& x) {
  VectorXd out(x.rows());
  for (Index r = 0; r < x.rows(); ++r) out(r) = tree.eval(x.row(r));
  return out;
}

double prior_log_odds(const Dataset& d) {
  const auto c = d.class_counts();
  return std::log(static_cast<double>(c[1]) / static_cast<double>(c[0]));
}

}  // namespace

double mean_log_loss(const VectorXd& f, const LabelVector& y) {
  double s = 0.0;
  for (Index i = 0; i < f.size(); ++i) s += softplus(-static_cast<double>(y(i)) * f(i));
  return f.size() > 0 ? s / static_cast<double>(f.size()) : 0.0;
}

// ---------------------------------------------------------------------------

void ForestParams::validate() const {
  if (n_trees < 1) throw SpecError("forest: n_trees must be >= 1");
  if (max_features < 1 || max_features > kFeatureCount) throw SpecError("forest: max_features must lie in [1, 30]");
  tree.validate();
}

EnsembleModel train_forest(const Dataset& train, const ForestParams& params, std::uint64_t seed, int jobs) {
  params.validate();
  if (train.empty()) throw SpecError("forest: empty training set");
  const auto n = static_cast<std::size_t>(train.size());

  EnsembleModel model;
  model.aggregation = Aggregation::MajorityVote;
  model.members.resize(static_cast<std::size_t>(params.n_trees));
  model.member_weights.assign(static_cast<std::size_t>(params.n_trees), 1.0);

  auto grow = [&](int t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<Index> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<Index>(rng.uniform_index(n));
    } else {
      std::iota(rows.begin(), rows.end(), Index{0});
    }
    const detail::GiniCriterion crit{train.labels(), {}};
    detail::GrowParams gp{params.tree.max_depth, params.tree.min_leaf, params.max_features, {}};
    detail::TreeGrower grower(crit, train.features(), gp, &rng);
    model.members[static_cast<std::size_t>(t)] = grower.grow(std::move(rows));
  };

  const int workers = std::clamp(jobs, 1, params.n_trees);
  if (workers == 1) {
    for (int t = 0; t < params.n_trees; ++t) grow(t);
    return model;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int t = next++; t < params.n_trees; t = next++) {
        try {
          grow(t);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return model;
}

// ---------------------------------------------------------------------------

void AdaBoostParams::validate() const {
  if (n_rounds < 1) throw SpecError("adaboost: n_rounds must be >= 1");
  if (stump_depth < 1) throw SpecError("adaboost: stump_depth must be >= 1");
}

EnsembleModel train_adaboost(const Dataset& train, const AdaBoostParams& params, AdaBoostTrace* trace) {
  params.validate();
  require_both_classes(train, "adaboost");
  const Index n = train.size();
  const auto rows = all_rows(train);
  std::vector<double> w(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));

  EnsembleModel model;
  model.aggregation = Aggregation::WeightedVote;
  const TreeParams tp{params.stump_depth, 1, 0};
  for (int round = 0; round < params.n_rounds; ++round) {
    TreeModel stump = train_tree(train, rows, w, tp, 0);
    const VectorXd h = tree_outputs(stump, train.features());
    double err = 0.0;
    for (Index i = 0; i < n; ++i)
      if (h(i) != train.labels()(i)) err += w[static_cast<std::size_t>(i)];

    if (err >= 0.5) {
      if (round == 0) throw TrainingError("adaboost: first weak learner has weighted error >= 0.5");
      break;
    }
    const bool perfect = err <= 0.0;
    const double eps = perfect ? 1e-10 : err;
    const double alpha = 0.5 * std::log((1.0 - eps) / eps);
    model.members.push_back(std::move(stump));
    model.member_weights.push_back(alpha);
    if (trace) trace->errors.push_back(err);
    if (perfect) break;

    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto& wi = w[static_cast<std::size_t>(i)];
      wi *= std::exp(-alpha * train.labels()(i) * h(i));
      sum += wi;
    }
    for (auto& wi : w) wi /= sum;
    if (trace) {
      trace->weight_sums.push_back(std::accumulate(w.begin(), w.end(), 0.0));
      trace->weights.push_back(w);
    }
  }
  return model;
}

// ---------------------------------------------------------------------------

void GBoostParams::validate() const {
  if (n_rounds < 0) throw SpecError("gboost: n_rounds must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw SpecError("gboost: learning_rate must lie in (0, 1]");
  if (max_depth < 1) throw SpecError("gboost: max_depth must be >= 1");
  if (min_leaf < 1) throw SpecError("gboost: min_leaf must be >= 1");
}

EnsembleModel train_gboost(const Dataset& train, const GBoostParams& params, BoostTrace* trace) {
  params.validate();
  require_both_classes(train, "gboost");
  const Index n = train.size();
  const LabelVector& y = train.labels();

  EnsembleModel model;
  model.aggregation = Aggregation::AdditiveScore;
  model.base_score = prior_log_odds(train);
  VectorXd f = VectorXd::Constant(n, model.base_score);
  double loss = mean_log_loss(f, y);
  if (trace) trace->loss.push_back(loss);

  std::vector<double> residual(static_cast<std::size_t>(n)), hessian(static_cast<std::size_t>(n));
  for (int round = 0; round < params.n_rounds; ++round) {
    for (Index i = 0; i < n; ++i) {
      const double p = sigmoid(f(i));
      residual[static_cast<std::size_t>(i)] = (y(i) > 0 ? 1.0 : 0.0) - p;
      hessian[static_cast<std::size_t>(i)] = p * (1.0 - p);
    }
    const detail::ResidualCriterion crit{residual, hessian, y};
    detail::TreeGrower grower(crit, train.features(), {params.max_depth, params.min_leaf, 0, {}}, nullptr);
    TreeModel tree = grower.grow(all_rows(train));

    VectorXd step = params.learning_rate * tree_outputs(tree, train.features());
    double next = mean_log_loss(f + step, y);
    for (int h = 0; h < 60 && next > loss; ++h) {
      for (auto& node : tree.nodes) node.value *= 0.5;
      step *= 0.5;
      next = mean_log_loss(f + step, y);
      if (trace) ++trace->halvings;
    }
    if (next > loss) {
      for (auto& node : tree.nodes) node.value = 0.0;
      step.setZero();
      next = loss;
    }
    f += step;
    loss = next;
    model.members.push_back(std::move(tree));
    model.member_weights.push_back(params.learning_rate);
    if (trace) trace->loss.push_back(loss);
  }
  return model;
}

// ---------------------------------------------------------------------------

void XgbParams::validate() const {
  if (n_rounds < 0) throw SpecError("xgboost_like: n_rounds must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw SpecError("xgboost_like: learning_rate must lie in (0, 1]");
  if (max_depth < 1) throw SpecError("xgboost_like: max_depth must be >= 1");
  if (!(lambda >= 0.0)) throw SpecError("xgboost_like: lambda must be >= 0");
  if (!(gamma >= 0.0)) throw SpecError("xgboost_like: gamma must be >= 0");
  if (!(min_child_weight >= 0.0)) throw SpecError("xgboost_like: min_child_weight must be >= 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw SpecError("xgboost_like: subsample must lie in (0, 1]");
  if (!(colsample > 0.0 && colsample <= 1.0)) throw SpecError("xgboost_like: colsample must lie in (0, 1]");
}

EnsembleModel train_xgboost_like(const Dataset& train, const XgbParams& params, std::uint64_t seed,
                                 BoostTrace* trace) {
  params.validate();
  require_both_classes(train, "xgboost_like");
  const Index n = train.size();
  const LabelVector& y = train.labels();
  Rng rng(seed);

  EnsembleModel model;
  model.aggregation = Aggregation::AdditiveScore;
  model.base_score = prior_log_odds(train);
  VectorXd f = VectorXd::Constant(n, model.base_score);
  if (trace) trace->loss.push_back(mean_log_loss(f, y));

  const auto n_rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(params.subsample * n)));
  const auto n_cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(params.colsample * kFeatureCount)));
  std::vector<double> grad(static_cast<std::size_t>(n)), hess(static_cast<std::size_t>(n));
  for (int round = 0; round < params.n_rounds; ++round) {
    for (Index i = 0; i < n; ++i) {
      const double p = sigmoid(f(i));
      grad[static_cast<std::size_t>(i)] = p - (y(i) > 0 ? 1.0 : 0.0);
      hess[static_cast<std::size_t>(i)] = p * (1.0 - p);
    }
    std::vector<Index> rows = all_rows(train);
    if (n_rows < rows.size()) {
      rng.shuffle(std::span<Index>(rows));
      rows.resize(n_rows);
      std::sort(rows.begin(), rows.end());
    }
    std::vector<int> cols;
    if (n_cols < static_cast<std::size_t>(kFeatureCount)) {
      cols.resize(kFeatureCount);
      std::iota(cols.begin(), cols.end(), 0);
      rng.shuffle(std::span<int>(cols));
      cols.resize(n_cols);
      std::sort(cols.begin(), cols.end());
    }
    const detail::SecondOrderCriterion crit{grad, hess, params.lambda, params.gamma, params.min_child_weight, y};
    detail::TreeGrower grower(crit, train.features(), {params.max_depth, 1, 0, std::move(cols)}, nullptr);
    TreeModel tree = grower.grow(std::move(rows));
    f += params.learning_rate * tree_outputs(tree, train.features());
    model.members.push_back(std::move(tree));
    model.member_weights.push_back(params.learning_rate);
    if (trace) trace->loss.push_back(mean_log_loss(f, y));
  }
  return model;
}

}  // namespace phishml
