#include "phishml/classifier.hpp"

#include <set>

#include "phishml/error.hpp"
#include "overloaded.hpp"

namespace phishml {

using nlohmann::json;

namespace {

using detail::Overloaded;

/// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw SpecError(context_ + ": expected a JSON object");
  }

  void get(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      const auto x = v->get<long long>();
      if (x < INT32_MIN || x > INT32_MAX) fail(key, "a 32-bit integer");
      out = static_cast<int>(x);
    }
  }
  void get(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  const json* object(const char* key) { return find(key); }
  void get(const char* key, std::vector<int>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) fail(key, "an array of integers");
        out.push_back(e.get<int>());
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw SpecError(context_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  [[noreturn]] void fail(const char* key, const char* expected) const {
    throw SpecError(context_ + ": '" + key + "' must be " + expected);
  }

  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

std::string_view metric_name(DistanceMetric m) { return m == DistanceMetric::Euclidean ? "euclidean" : "manhattan"; }

DistanceMetric metric_from_string(const std::string& s) {
  if (s == "euclidean") return DistanceMetric::Euclidean;
  if (s == "manhattan") return DistanceMetric::Manhattan;
  throw SpecError("knn: unknown metric '" + s + "'");
}

std::string_view activation_name(Activation a) { return a == Activation::Relu ? "relu" : "softplus"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "softplus") return Activation::Softplus;
  throw SpecError("mlp: unknown activation '" + s + "'");
}

json params_to_json(const Hyperparams& h) {
  return std::visit(
      Overloaded{
          [](const LogisticParams& p) -> json {
            return {{"learning_rate", p.learning_rate}, {"iterations", p.iterations}, {"l2", p.l2}};
          },
          [](const KnnParams& p) -> json { return {{"k", p.k}, {"metric", metric_name(p.metric)}}; },
          [](const SvmParams& p) -> json {
            return {{"kernel", to_string(p.kernel.kind)}, {"C", p.kernel.C},         {"gamma", p.kernel.gamma},
                    {"coef0", p.kernel.coef0},           {"degree", p.kernel.degree}, {"tol", p.tol},
                    {"max_passes", p.max_passes},        {"cache_mb", p.cache_mb}};
          },
          [](const TreeParams& p) -> json {
            return {{"max_depth", p.max_depth}, {"min_leaf", p.min_leaf}, {"max_features", p.max_features}};
          },
          [](const ForestParams& p) -> json {
            return {{"n_trees", p.n_trees},
                    {"max_features", p.max_features},
                    {"bootstrap", p.bootstrap},
                    {"max_depth", p.tree.max_depth},
                    {"min_leaf", p.tree.min_leaf}};
          },
          [](const AdaBoostParams& p) -> json { return {{"n_rounds", p.n_rounds}, {"stump_depth", p.stump_depth}}; },
          [](const GBoostParams& p) -> json {
            return {{"n_rounds", p.n_rounds},
                    {"learning_rate", p.learning_rate},
                    {"max_depth", p.max_depth},
                    {"min_leaf", p.min_leaf}};
          },
          [](const XgbParams& p) -> json {
            return {{"n_rounds", p.n_rounds}, {"learning_rate", p.learning_rate},
                    {"max_depth", p.max_depth}, {"lambda", p.lambda},
                    {"gamma", p.gamma},         {"min_child_weight", p.min_child_weight},
                    {"subsample", p.subsample}, {"colsample", p.colsample}};
          },
          [](const MlpParams& p) -> json {
            return {{"hidden", p.hidden},     {"activation", activation_name(p.activation)},
                    {"epochs", p.epochs},     {"batch_size", p.batch_size},
                    {"learning_rate", p.learning_rate}, {"beta1", p.beta1},
                    {"beta2", p.beta2},       {"epsilon", p.epsilon},
                    {"l2", p.l2},             {"patience", p.patience},
                    {"tol", p.tol},           {"validation_fraction", p.validation_fraction}};
          },
      },
      h);
}

void read_params(Fields& f, Hyperparams& h) {
  std::visit(Overloaded{
                 [&](LogisticParams& p) {
                   f.get("learning_rate", p.learning_rate);
                   f.get("iterations", p.iterations);
                   f.get("l2", p.l2);
                 },
                 [&](KnnParams& p) {
                   f.get("k", p.k);
                   std::string metric(metric_name(p.metric));
                   f.get("metric", metric);
                   p.metric = metric_from_string(metric);
                 },
                 [&](SvmParams& p) {
                   std::string kind(to_string(p.kernel.kind));
                   f.get("kernel", kind);
                   p.kernel.kind = kernel_kind_from_string(kind);
                   f.get("C", p.kernel.C);
                   f.get("gamma", p.kernel.gamma);
                   f.get("coef0", p.kernel.coef0);
                   f.get("degree", p.kernel.degree);
                   f.get("tol", p.tol);
                   f.get("max_passes", p.max_passes);
                   f.get("cache_mb", p.cache_mb);
                 },
                 [&](TreeParams& p) {
                   f.get("max_depth", p.max_depth);
                   f.get("min_leaf", p.min_leaf);
                   f.get("max_features", p.max_features);
                 },
                 [&](ForestParams& p) {
                   f.get("n_trees", p.n_trees);
                   f.get("max_features", p.max_features);
                   f.get("bootstrap", p.bootstrap);
                   f.get("max_depth", p.tree.max_depth);
                   f.get("min_leaf", p.tree.min_leaf);
                 },
                 [&](AdaBoostParams& p) {
                   f.get("n_rounds", p.n_rounds);
                   f.get("stump_depth", p.stump_depth);
                 },
                 [&](GBoostParams& p) {
                   f.get("n_rounds", p.n_rounds);
                   f.get("learning_rate", p.learning_rate);
                   f.get("max_depth", p.max_depth);
                   f.get("min_leaf", p.min_leaf);
                 },
                 [&](XgbParams& p) {
                   f.get("n_rounds", p.n_rounds);
                   f.get("learning_rate", p.learning_rate);
                   f.get("max_depth", p.max_depth);
                   f.get("lambda", p.lambda);
                   f.get("gamma", p.gamma);
                   f.get("min_child_weight", p.min_child_weight);
                   f.get("subsample", p.subsample);
                   f.get("colsample", p.colsample);
                 },
                 [&](MlpParams& p) {
                   f.get("hidden", p.hidden);
                   std::string act(activation_name(p.activation));
                   f.get("activation", act);
                   p.activation = activation_from_string(act);
                   f.get("epochs", p.epochs);
                   f.get("batch_size", p.batch_size);
                   f.get("learning_rate", p.learning_rate);
                   f.get("beta1", p.beta1);
                   f.get("beta2", p.beta2);
                   f.get("epsilon", p.epsilon);
                   f.get("l2", p.l2);
                   f.get("patience", p.patience);
                   f.get("tol", p.tol);
                   f.get("validation_fraction", p.validation_fraction);
                 },
             },
             h);
}

}  // namespace

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::Logistic: return "logistic";
    case Family::Knn: return "knn";
    case Family::Svm: return "svm";
    case Family::Tree: return "tree";
    case Family::Forest: return "forest";
    case Family::AdaBoost: return "adaboost";
    case Family::GBoost: return "gboost";
    case Family::XgboostLike: return "xgboost_like";
    case Family::Mlp: return "mlp";
  }
  return "?";
}

Family family_from_string(std::string_view s) {
  for (int i = 0; i < static_cast<int>(std::variant_size_v<Hyperparams>); ++i)
    if (to_string(static_cast<Family>(i)) == s) return static_cast<Family>(i);
  if (s == "xgboost-like" || s == "xgboost") return Family::XgboostLike;
  throw SpecError("unknown family '" + std::string(s) +
                  "' (expected logistic, knn, svm, tree, forest, adaboost, gboost, xgboost_like or mlp)");
}

std::string ClassifierSpec::display_name() const {
  if (!name.empty()) return name;
  if (const auto* svm = std::get_if<SvmParams>(&hyperparams)) return "svm-" + std::string(to_string(svm->kernel.kind));
  return std::string(to_string(family()));
}

void ClassifierSpec::validate() const {
  std::visit([](const auto& p) { p.validate(); }, hyperparams);
}

ClassifierSpec ClassifierSpec::defaults(Family f, std::uint64_t seed) {
  ClassifierSpec spec;
  spec.seed = seed;
  switch (f) {
    case Family::Logistic: spec.hyperparams = LogisticParams{}; break;
    case Family::Knn: spec.hyperparams = KnnParams{}; break;
    case Family::Svm: spec.hyperparams = SvmParams{}; break;
    case Family::Tree: spec.hyperparams = TreeParams{}; break;
    case Family::Forest: spec.hyperparams = ForestParams{}; break;
    case Family::AdaBoost: spec.hyperparams = AdaBoostParams{}; break;
    case Family::GBoost: spec.hyperparams = GBoostParams{}; break;
    case Family::XgboostLike: spec.hyperparams = XgbParams{}; break;
    case Family::Mlp: spec.hyperparams = MlpParams{}; break;
  }
  return spec;
}

ClassifierSpec spec_from_json(const json& j, std::uint64_t default_seed) {
  Fields top(j, "classifier spec");
  std::string family;
  top.get("family", family);
  if (family.empty()) throw SpecError("classifier spec: 'family' is required");
  ClassifierSpec spec = ClassifierSpec::defaults(family_from_string(family), default_seed);
  top.get("name", spec.name);
  top.get("seed", spec.seed);
  if (const json* hp_json = top.object("hyperparams")) {
    Fields hp(*hp_json, std::string(to_string(spec.family())) + " hyperparams");
    read_params(hp, spec.hyperparams);
    hp.finish();
  }
  top.finish();
  spec.validate();
  return spec;
}

ClassifierSpec spec_from_json_text(std::string_view text, std::uint64_t default_seed) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("classifier spec is not valid JSON: ") + e.what());
  }
  return spec_from_json(j, default_seed);
}

json to_json(const ClassifierSpec& spec) {
  json j{{"family", to_string(spec.family())}, {"hyperparams", params_to_json(spec.hyperparams)}, {"seed", spec.seed}};
  if (!spec.name.empty()) j["name"] = spec.name;
  return j;
}

std::vector<ClassifierSpec> comparison_battery(std::uint64_t seed) {
  std::vector<ClassifierSpec> out;
  for (Family f : {Family::Logistic, Family::Tree, Family::Forest, Family::AdaBoost, Family::Knn, Family::Mlp})
    out.push_back(ClassifierSpec::defaults(f, seed));
  for (KernelKind k : {KernelKind::Linear, KernelKind::Polynomial, KernelKind::Rbf, KernelKind::Sigmoid}) {
    auto spec = ClassifierSpec::defaults(Family::Svm, seed);
    std::get<SvmParams>(spec.hyperparams).kernel.kind = k;
    out.push_back(std::move(spec));
  }
  out.push_back(ClassifierSpec::defaults(Family::GBoost, seed));
  out.push_back(ClassifierSpec::defaults(Family::XgboostLike, seed));
  return out;
}

FitResult fit(const ClassifierSpec& spec, const Dataset& train, int jobs) {
  spec.validate();
  if (train.empty()) throw SpecError("fit: empty training set");
  FitResult r;
  std::visit(Overloaded{
                 [&](const LogisticParams& p) { r.model = train_logistic(train, p); },
                 [&](const KnnParams& p) { r.model = train_knn(train, p); },
                 [&](const SvmParams& p) {
                   SvmStatus status;
                   r.model = train_svm_smo(train, p, &status);
                   if (!status.converged) {
                     r.converged = false;
                     r.warning = "svm: iteration cap reached with KKT violation " + std::to_string(status.max_violation);
                   }
                 },
                 [&](const TreeParams& p) { r.model = train_tree(train, p, spec.seed); },
                 [&](const ForestParams& p) { r.model = train_forest(train, p, spec.seed, jobs); },
                 [&](const AdaBoostParams& p) { r.model = train_adaboost(train, p); },
                 [&](const GBoostParams& p) { r.model = train_gboost(train, p); },
                 [&](const XgbParams& p) { r.model = train_xgboost_like(train, p, spec.seed); },
                 [&](const MlpParams& p) {
                   MlpTrace trace;
                   r.model = train_mlp(train, p, spec.seed, &trace);
                   if (p.epochs > 0 && !trace.stopped_early) {
                     r.converged = false;
                     r.warning = "mlp: epoch cap reached before early stopping";
                   }
                 },
             },
             spec.hyperparams);
  return r;
}

}  // namespace phishml
