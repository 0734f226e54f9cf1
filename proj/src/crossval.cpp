#include "phishml/crossval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "phishml/error.hpp"

namespace phishml {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Body>
void run_folds(int k, int jobs, Body body) {
  const int workers = std::clamp(jobs, 1, k);
  if (workers == 1) {
    for (int f = 0; f < k; ++f) body(f);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int f = next++; f < k; f = next++) {
        try {
          body(f);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct Trained {
  PredictFn predict;
  bool converged = true;
  std::string warning;
};

CrossValReport run(const Dataset& d, const FoldPlan& plan, int jobs, const std::function<Trained(const Dataset&)>& train_fold) {
  if (static_cast<Index>(plan.assignments.size()) != d.size())
    throw SpecError("cross_validate: fold plan covers " + std::to_string(plan.assignments.size()) +
                    " samples, dataset has " + std::to_string(d.size()));
  CrossValReport report;
  report.k = plan.k;
  report.seed = plan.seed;
  report.fold_plan_hash = plan.hash();
  report.per_fold.resize(static_cast<std::size_t>(plan.k));

  run_folds(plan.k, jobs, [&](int f) {
    const auto train_idx = plan.train_indices(f);
    const auto test_idx = plan.test_indices(f);
    const Dataset train = d.subset(train_idx);
    const Dataset test = d.subset(test_idx);

    auto t0 = Clock::now();
    Trained trained = train_fold(train);
    const double train_time = seconds_since(t0);

    t0 = Clock::now();
    const std::vector<Label> predictions = trained.predict(test);
    const double test_time = seconds_since(t0);

    std::vector<Label> truths(static_cast<std::size_t>(test.size()));
    for (Index i = 0; i < test.size(); ++i) truths[static_cast<std::size_t>(i)] = test.label(i);

    FoldResult& r = report.per_fold[static_cast<std::size_t>(f)];
    r.fold = f;
    r.counts = confusion(predictions, truths);
    r.metrics = metrics(r.counts);
    r.metrics.train_time_s = train_time;
    r.metrics.test_time_s = test_time;
    r.converged = trained.converged;
    r.warning = std::move(trained.warning);
  });

  double train_sum = 0.0, test_sum = 0.0;
  for (const auto& r : report.per_fold) {
    report.pooled += r.counts;
    train_sum += r.metrics.train_time_s;
    test_sum += r.metrics.test_time_s;
  }
  report.aggregate = metrics(report.pooled);
  report.aggregate.train_time_s = train_sum / plan.k;
  report.aggregate.test_time_s = test_sum / plan.k;
  return report;
}

int parse_positive_int(const std::string& s, const std::string& axis) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || v < 1)
    throw SpecError(axis + ": value '" + s + "' is not a positive integer");
  return v;
}

}  // namespace

bool CrossValReport::converged() const {
  return std::all_of(per_fold.begin(), per_fold.end(), [](const FoldResult& r) { return r.converged; });
}

CrossValReport cross_validate(const Dataset& d, const ClassifierSpec& spec, const FoldPlan& plan, int jobs) {
  spec.validate();
  // Folds already run in parallel; members only when folds do not.
  const int member_jobs = jobs > 1 && plan.k < jobs ? jobs / plan.k : 1;
  CrossValReport report = run(d, plan, jobs, [&](const Dataset& train) {
    auto fitted = std::make_shared<FitResult>(fit(spec, train, member_jobs));
    Trained t;
    t.converged = fitted->converged;
    t.warning = fitted->warning;
    t.predict = [fitted](const Dataset& test) { return predict_all(fitted->model, test); };
    return t;
  });
  report.name = spec.display_name();
  report.spec = spec;
  return report;
}

CrossValReport cross_validate(const Dataset& d, const ClassifierSpec& spec, int k, std::uint64_t seed, int jobs) {
  return cross_validate(d, spec, stratified_kfold(d, k, seed), jobs);
}

CrossValReport cross_validate(const Dataset& d, const LearnerFn& learner, std::string name, const FoldPlan& plan,
                              int jobs) {
  CrossValReport report = run(d, plan, jobs, [&](const Dataset& train) { return Trained{learner(train), true, {}}; });
  report.name = std::move(name);
  return report;
}

std::vector<std::string> sweep_axes() { return {"svm-kernel", "knn-k", "mlp-depth"}; }

std::vector<std::string> default_axis_values(const std::string& axis) {
  if (axis == "svm-kernel") return {"linear", "poly", "rbf", "sigmoid"};
  if (axis == "knn-k") return {"1", "3", "5", "7", "9", "15", "25"};
  if (axis == "mlp-depth") return {"1", "2", "4", "8"};
  throw SpecError("unknown sweep axis '" + axis + "' (expected svm-kernel, knn-k or mlp-depth)");
}

ClassifierSpec apply_axis(const ClassifierSpec& base, const std::string& axis, const std::string& value) {
  ClassifierSpec spec = base;
  spec.name.clear();
  if (axis == "svm-kernel") {
    if (spec.family() != Family::Svm) spec = ClassifierSpec::defaults(Family::Svm, base.seed);
    std::get<SvmParams>(spec.hyperparams).kernel.kind = kernel_kind_from_string(value);
  } else if (axis == "knn-k") {
    if (spec.family() != Family::Knn) spec = ClassifierSpec::defaults(Family::Knn, base.seed);
    std::get<KnnParams>(spec.hyperparams).k = parse_positive_int(value, axis);
    spec.name = "knn-k" + value;
  } else if (axis == "mlp-depth") {
    if (spec.family() != Family::Mlp) spec = ClassifierSpec::defaults(Family::Mlp, base.seed);
    auto& p = std::get<MlpParams>(spec.hyperparams);
    const int width = p.hidden.empty() ? 30 : p.hidden.front();
    p.hidden.assign(static_cast<std::size_t>(parse_positive_int(value, axis)), width);
    spec.name = "mlp-depth" + value;
  } else {
    throw SpecError("unknown sweep axis '" + axis + "' (expected svm-kernel, knn-k or mlp-depth)");
  }
  spec.validate();
  return spec;
}

SweepResult sweep(const Dataset& d, const ClassifierSpec& base, const std::string& axis,
                  const std::vector<std::string>& values, int k, std::uint64_t seed, int jobs) {
  if (values.empty()) throw SpecError("sweep: no axis values");
  std::vector<ClassifierSpec> specs;
  for (const auto& v : values) specs.push_back(apply_axis(base, axis, v));
  const FoldPlan plan = stratified_kfold(d, k, seed);
  SweepResult out;
  out.axis_name = axis;
  out.axis_values = values;
  for (const auto& spec : specs) out.reports.push_back(cross_validate(d, spec, plan, jobs));
  return out;
}

Eigen::MatrixXd correlation_matrix(const Dataset& d) {
  if (d.empty()) throw SpecError("correlation_matrix: empty dataset");
  const Index cols = kFeatureCount + 1;
  Eigen::MatrixXd x(d.size(), cols);
  x.leftCols(kFeatureCount) = d.design_matrix<double>();
  x.col(kFeatureCount) = d.label_vector<double>();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = x.transpose() * x;
  Eigen::MatrixXd r(cols, cols);
  for (Index i = 0; i < cols; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (cov(i, i) <= 0.0 || cov(j, j) <= 0.0) {
        r(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else if (i == j) {
        r(i, j) = 1.0;
      } else {
        r(i, j) = std::clamp(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
      }
    }
  }
  return r;
}

}  // namespace phishml
