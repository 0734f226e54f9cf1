#include "phishml/serialize.hpp"

#include <fstream>
#include <sstream>

#include "phishml/error.hpp"
#include "overloaded.hpp"

namespace phishml {

using nlohmann::json;

namespace {

using detail::Overloaded;

constexpr const char* kFormatTag = "phishml-model";

template <typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename M>
M matrix_from_json(const json& j, Index cols_expected = -1) {
  if (!j.is_array()) throw Error("model file: matrix must be an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j[0].size()) : std::max<Index>(cols_expected, 0);
  if (cols_expected >= 0 && cols != cols_expected)
    throw Error("model file: expected " + std::to_string(cols_expected) + " columns, got " + std::to_string(cols));
  M m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw Error("model file: ragged matrix");
    for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<typename M::Scalar>();
  }
  return m;
}

template <typename V>
json vector_to_json(const V& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

template <typename V>
V vector_from_json(const json& j) {
  if (!j.is_array()) throw Error("model file: vector must be an array");
  V v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<typename V::Scalar>();
  return v;
}

json kernel_to_json(const KernelSpec& k) {
  return {{"kind", to_string(k.kind)}, {"C", k.C}, {"gamma", k.gamma}, {"coef0", k.coef0}, {"degree", k.degree}};
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  k.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
  k.C = j.at("C").get<double>();
  k.gamma = j.at("gamma").get<double>();
  k.coef0 = j.at("coef0").get<double>();
  k.degree = j.at("degree").get<int>();
  return k;
}

json node_to_json(const TreeModel& t, int i) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
  json j{{"weights", {n.weight_phishing, n.weight_legitimate}}};
  if (n.is_leaf()) {
    j["value"] = n.value;
  } else {
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(t, n.left);
    j["right"] = node_to_json(t, n.right);
  }
  return j;
}

int node_from_json(TreeModel& t, const json& j, int depth) {
  if (depth > 10000) throw Error("model file: tree too deep");
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  const auto& w = j.at("weights");
  t.nodes.back().weight_phishing = w.at(0).get<double>();
  t.nodes.back().weight_legitimate = w.at(1).get<double>();
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    if (feature < 0 || feature >= kFeatureCount) throw Error("model file: split feature out of range");
    const double threshold = j.at("threshold").get<double>();
    const int left = node_from_json(t, j.at("left"), depth + 1);
    const int right = node_from_json(t, j.at("right"), depth + 1);
    auto& n = t.nodes[static_cast<std::size_t>(id)];
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
  } else {
    t.nodes[static_cast<std::size_t>(id)].value = j.at("value").get<double>();
  }
  return id;
}

json tree_to_json(const TreeModel& t) { return t.nodes.empty() ? json(nullptr) : node_to_json(t, 0); }

TreeModel tree_from_json(const json& j) {
  TreeModel t;
  node_from_json(t, j, 0);
  return t;
}

std::string_view aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::MajorityVote: return "majority_vote";
    case Aggregation::WeightedVote: return "weighted_vote";
    case Aggregation::AdditiveScore: return "additive_score";
  }
  return "?";
}

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "majority_vote") return Aggregation::MajorityVote;
  if (s == "weighted_vote") return Aggregation::WeightedVote;
  if (s == "additive_score") return Aggregation::AdditiveScore;
  throw Error("model file: unknown aggregation '" + s + "'");
}

}  // namespace

json model_to_json(const TrainedModel& m) {
  json body = std::visit(
      Overloaded{
          [](const LinearModel& l) -> json { return {{"weights", vector_to_json(l.weights)}, {"bias", l.bias}}; },
          [](const KnnModel& k) -> json {
            return {{"k", k.k},
                    {"metric", k.metric == DistanceMetric::Euclidean ? "euclidean" : "manhattan"},
                    {"points", matrix_to_json(k.points)},
                    {"labels", vector_to_json(k.labels)}};
          },
          [](const KernelMachineModel& k) -> json {
            return {{"kernel", kernel_to_json(k.kernel)},
                    {"bias", k.bias},
                    {"alphas", vector_to_json(k.alphas)},
                    {"labels", vector_to_json(k.labels)},
                    {"support_vectors", matrix_to_json(k.support_vectors)}};
          },
          [](const TreeModel& t) -> json { return {{"root", tree_to_json(t)}}; },
          [](const EnsembleModel& e) -> json {
            json members = json::array();
            for (const auto& t : e.members) members.push_back(tree_to_json(t));
            return {{"aggregation", aggregation_name(e.aggregation)},
                    {"base_score", e.base_score},
                    {"member_weights", e.member_weights},
                    {"members", std::move(members)}};
          },
          [](const MlpModel& n) -> json {
            json layers = json::array();
            for (std::size_t l = 0; l < n.weights.size(); ++l)
              layers.push_back({{"weights", matrix_to_json(n.weights[l])}, {"biases", vector_to_json(n.biases[l])}});
            return {{"layer_sizes", n.layer_sizes},
                    {"activation", n.hidden_activation == Activation::Relu ? "relu" : "softplus"},
                    {"layers", std::move(layers)}};
          },
      },
      m);
  return {{"format", kFormatTag}, {"version", kModelFormatVersion}, {"kind", model_kind(m)}, {"model", std::move(body)}};
}

TrainedModel model_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != kFormatTag) throw Error("model file: not a phishml model");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw Error("model file: unsupported version " + std::to_string(version) + " (expected " +
                  std::to_string(kModelFormatVersion) + ")");
    const std::string kind = j.at("kind").get<std::string>();
    const json& b = j.at("model");
    TrainedModel out;
    if (kind == "linear") {
      LinearModel l;
      l.weights = vector_from_json<VectorXd>(b.at("weights"));
      l.bias = b.at("bias").get<double>();
      out = std::move(l);
    } else if (kind == "knn") {
      KnnModel k;
      k.k = b.at("k").get<int>();
      const std::string metric = b.at("metric").get<std::string>();
      if (metric != "euclidean" && metric != "manhattan") throw Error("model file: unknown metric '" + metric + "'");
      k.metric = metric == "euclidean" ? DistanceMetric::Euclidean : DistanceMetric::Manhattan;
      k.points = matrix_from_json<Matrix<double>>(b.at("points"), kFeatureCount);
      k.squared_norms = k.points.rowwise().squaredNorm();
      k.labels = vector_from_json<LabelVector>(b.at("labels"));
      out = std::move(k);
    } else if (kind == "kernel_machine") {
      KernelMachineModel k;
      k.kernel = kernel_from_json(b.at("kernel"));
      k.kernel.validate();
      k.bias = b.at("bias").get<double>();
      k.alphas = vector_from_json<VectorXd>(b.at("alphas"));
      k.labels = vector_from_json<LabelVector>(b.at("labels"));
      k.support_vectors = matrix_from_json<Matrix<double>>(b.at("support_vectors"), kFeatureCount);
      out = std::move(k);
    } else if (kind == "tree") {
      out = tree_from_json(b.at("root"));
    } else if (kind == "ensemble") {
      EnsembleModel e;
      e.aggregation = aggregation_from_string(b.at("aggregation").get<std::string>());
      e.base_score = b.at("base_score").get<double>();
      e.member_weights = b.at("member_weights").get<std::vector<double>>();
      for (const auto& t : b.at("members")) e.members.push_back(tree_from_json(t));
      out = std::move(e);
    } else if (kind == "mlp") {
      MlpModel n;
      n.layer_sizes = b.at("layer_sizes").get<std::vector<int>>();
      const std::string act = b.at("activation").get<std::string>();
      if (act != "relu" && act != "softplus") throw Error("model file: unknown activation '" + act + "'");
      n.hidden_activation = act == "relu" ? Activation::Relu : Activation::Softplus;
      for (const auto& layer : b.at("layers")) {
        n.weights.push_back(matrix_from_json<MatrixXd>(layer.at("weights")));
        n.biases.push_back(vector_from_json<VectorXd>(layer.at("biases")));
      }
      out = std::move(n);
    } else {
      throw Error("model file: unknown model kind '" + kind + "'");
    }
    check_invariants(out);
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& m, const ClassifierSpec* spec) {
  json j = model_to_json(m);
  if (spec) j["spec"] = to_json(*spec);
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  out << j.dump() << '\n';
  if (!out) throw Error("failed writing model file " + path.string());
}

ModelFile parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("model file: invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  ModelFile f{model_from_json(j), std::nullopt};
  if (const auto it = j.find("spec"); it != j.end()) f.spec = spec_from_json(*it);
  return f;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace phishml
