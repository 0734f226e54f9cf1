// phishml: dataset statistics, feature extraction, training and
// cross-validated comparison of phishing-website classifiers.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phishml/classifier.hpp"
#include "phishml/crossval.hpp"
#include "phishml/dataset.hpp"
#include "phishml/error.hpp"
#include "phishml/extract.hpp"
#include "phishml/report.hpp"
#include "phishml/serialize.hpp"

namespace {

using namespace phishml;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitAllRowsFailed = 4;
constexpr std::uint64_t kDefaultSeed = 42;

/// Raised for problems with the command line or its inputs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct Options {
  std::string config_path;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
  std::string data;
  std::string format = "text";
  std::string output;
  int k = 10;
  bool all = false;
  std::vector<std::string> specs;
  std::vector<std::string> spec_files;
  std::string axis;
  std::string values;
  std::vector<std::string> urls;
  std::string dump;
  std::string html;
  int redirects = -1;
  std::string evidence;
  std::string thresholds;
  std::string append;
  int label = -1;
  std::string model;
  std::string input;
};

/// Fill options the command line left unset from the --config JSON object.
/// Keys whose flag the running command lacks are rejected by finish().
class ConfigMerge {
 public:
  ConfigMerge(const json& cfg, std::vector<const CLI::App*> apps) : cfg_(cfg), apps_(std::move(apps)) {}

  template <typename T>
  void apply(const std::string& flag, const std::string& key, T& target) {
    const auto it = cfg_.find(key);
    if (it == cfg_.end()) return;
    const CLI::Option* opt = find(flag);
    if (opt == nullptr) return;
    known_.insert(key);
    if (opt->count() > 0) return;
    try {
      target = it->get<T>();
    } catch (const json::exception&) {
      throw UsageError("config: key '" + key + "' has the wrong type");
    }
  }

  const CLI::Option* find(const std::string& flag) const {
    for (const CLI::App* a : apps_)
      if (const CLI::Option* opt = a->get_option_no_throw(flag)) return opt;
    return nullptr;
  }

  void finish() const {
    for (auto it = cfg_.begin(); it != cfg_.end(); ++it)
      if (!known_.count(it.key())) throw UsageError("config: unknown key '" + it.key() + "' for this command");
  }

 private:
  const json& cfg_;
  std::vector<const CLI::App*> apps_;
  std::set<std::string> known_;
};

Dataset load_dataset(const Options& o) {
  if (o.data.empty()) throw UsageError("--data is required");
  return load_csv(o.data);
}

std::vector<ClassifierSpec> collect_specs(const Options& o) {
  std::vector<ClassifierSpec> specs;
  if (o.all) specs = comparison_battery(o.seed);
  for (const auto& text : o.specs) specs.push_back(spec_from_json_text(text, o.seed));
  for (const auto& path : o.spec_files) {
    const json j = json::parse(slurp(path), nullptr, false);
    if (j.is_discarded()) throw UsageError(path + ": not valid JSON");
    if (j.is_array()) {
      for (const auto& e : j) specs.push_back(spec_from_json(e, o.seed));
    } else {
      specs.push_back(spec_from_json(j, o.seed));
    }
  }
  if (specs.empty()) throw UsageError("no classifier given (use --all, --spec or --spec-file)");
  return specs;
}

ExtractorConfig load_thresholds(const Options& o) {
  return o.thresholds.empty() ? ExtractorConfig{} : ExtractorConfig::from_json(slurp(o.thresholds));
}

EvidenceTable load_evidence(const Options& o) {
  return o.evidence.empty() ? EvidenceTable{} : EvidenceTable::from_json(slurp(o.evidence));
}

RawWebsiteObservation observation_for(const Options& o, const std::string& url) {
  RawWebsiteObservation obs;
  obs.url = url;
  if (!o.html.empty()) obs.html = slurp(o.html);
  if (o.redirects >= 0) obs.redirect_count = o.redirects;
  return obs;
}

int cmd_summarize(const Options& o) {
  const Dataset d = load_dataset(o);
  if (d.empty()) throw UsageError(o.data + ": dataset has no samples");
  const auto stats = summarize(d);
  const auto fmt = report_format_from_string(o.format);
  write_output(o.output, fmt == ReportFormat::Json ? summary_to_json(stats).dump(2) + "\n" : render_summary(stats));
  return kExitOk;
}

int cmd_crossval(const Options& o) {
  const auto specs = collect_specs(o);
  const auto fmt = report_format_from_string(o.format);
  const Dataset d = load_dataset(o);
  const FoldPlan plan = stratified_kfold(d, o.k, o.seed);
  std::vector<CrossValReport> reports;
  bool converged = true;
  for (const auto& spec : specs) {
    std::cerr << "crossval: " << spec.display_name() << "\n";
    reports.push_back(cross_validate(d, spec, plan, o.jobs));
    if (!reports.back().converged()) {
      converged = false;
      for (const auto& f : reports.back().per_fold)
        if (!f.converged) std::cerr << "warning: " << spec.display_name() << " fold " << f.fold << ": " << f.warning << "\n";
    }
  }
  write_output(o.output, emit_report(reports, fmt));
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const Options& o) {
  if (o.axis.empty()) throw UsageError("--axis is required (svm-kernel, knn-k or mlp-depth)");
  const auto values = o.values.empty() ? default_axis_values(o.axis) : split_list(o.values);
  ClassifierSpec base = o.specs.empty() ? ClassifierSpec{} : spec_from_json_text(o.specs.front(), o.seed);
  if (o.specs.empty()) base.seed = o.seed;
  const Dataset d = load_dataset(o);
  const SweepResult s = sweep(d, base, o.axis, values, o.k, o.seed, o.jobs);
  if (o.output.empty() || o.output == "-") {
    std::cout << sweep_csv(s);
  } else {
    write_output(o.output + ".csv", sweep_csv(s));
    write_output(o.output + ".json", sweep_to_json(s).dump(2) + "\n");
  }
  const bool converged = std::all_of(s.reports.begin(), s.reports.end(), [](const auto& r) { return r.converged(); });
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_extract(const Options& o) {
  if (o.urls.empty() && o.dump.empty()) throw UsageError("give --url or --dump");
  const ExtractorConfig cfg = load_thresholds(o);
  const EvidenceTable evidence = load_evidence(o);
  const auto& schema = FeatureSchema::canonical();

  std::vector<LabeledSample> rows;
  std::size_t failed = 0, attempted = 0;
  json out_json = json::array();
  std::ostringstream text;

  auto emit = [&](const std::string& url, const FeatureVector& v) {
    json named = json::object();
    text << "# " << url << "\n";
    for (int i = 0; i < kFeatureCount; ++i) {
      text << schema.name(i) << "=" << int{v(i)} << "\n";
      named[schema.name(i)] = int{v(i)};
    }
    out_json.push_back({{"url", url}, {"features", std::move(named)}});
    rows.push_back({v, o.label > 0 ? Label::Legitimate : Label::Phishing});
  };

  for (const auto& url : o.urls) {
    ++attempted;
    try {
      emit(url, extract_all(observation_for(o, url), evidence.lookup(parse_url(url).host), schema, cfg));
    } catch (const DataError& e) {
      ++failed;
      std::cerr << "error: " << url << ": " << e.what() << "\n";
    }
  }
  if (!o.dump.empty()) {
    const IngestResult r = ingest_phishtank_dump(o.dump, evidence, cfg);
    attempted += static_cast<std::size_t>(r.dataset.size()) + r.skipped;
    failed += r.skipped;
    for (const auto& msg : r.errors) std::cerr << "error: " << msg << "\n";
    for (Index i = 0; i < r.dataset.size(); ++i) emit(o.dump + ":" + std::to_string(i + 1), r.dataset.sample(i).features);
  }

  if (!rows.empty()) {
    const auto fmt = report_format_from_string(o.format);
    write_output(o.output, fmt == ReportFormat::Json ? out_json.dump(2) + "\n" : text.str());
    if (!o.append.empty()) {
      const Dataset extra = Dataset::from_samples(rows, "extract");
      const bool exists = std::filesystem::exists(o.append);
      save_csv(o.append, exists ? concat(load_csv(o.append), extra) : extra);
    }
  }
  if (attempted > 0 && failed == attempted) return kExitAllRowsFailed;
  return kExitOk;
}

int cmd_train(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  const auto specs = collect_specs(o);
  if (specs.size() != 1) throw UsageError("train takes exactly one classifier spec");
  const Dataset d = load_dataset(o);
  const FitResult r = fit(specs.front(), d, o.jobs);
  save_model(o.model, r.model, &specs.front());
  if (!r.converged) {
    std::cerr << "warning: " << r.warning << "\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_predict(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  ModelFile mf;
  try {
    mf = load_model(o.model);
  } catch (const Error& e) {
    throw UsageError(o.model + ": " + e.what());
  }
  std::ostringstream out;
  auto line = [&](const std::string& id, double score) {
    out << id << "\t" << (label_from_score(score) == Label::Phishing ? "phishing" : "legitimate") << "\t" << score
        << "\n";
  };
  if (!o.data.empty()) {
    const Dataset d = load_csv(o.data);
    const VectorXd scores = decision_scores(mf.model, d.design_matrix<double>());
    for (Index i = 0; i < scores.size(); ++i) line(std::to_string(i + 1), scores(i));
  }
  if (!o.urls.empty()) {
    const ExtractorConfig cfg = load_thresholds(o);
    const EvidenceTable evidence = load_evidence(o);
    for (const auto& url : o.urls) {
      const FeatureVector v =
          extract_all(observation_for(o, url), evidence.lookup(parse_url(url).host), FeatureSchema::canonical(), cfg);
      const VectorXd x = v.cast<double>();
      line(url, decision_score(mf.model, x));
    }
  }
  if (o.data.empty() && o.urls.empty()) throw UsageError("give --data or --url");
  write_output(o.output, out.str());
  return kExitOk;
}

int cmd_report(const Options& o) {
  if (o.input.empty()) throw UsageError("--input is required");
  const json j = json::parse(slurp(o.input), nullptr, false);
  if (j.is_discarded()) throw UsageError(o.input + ": not valid JSON");
  write_output(o.output, emit_report(reports_from_json(j), report_format_from_string(o.format)));
  return kExitOk;
}

int cmd_correlate(const Options& o) {
  const Dataset d = load_dataset(o);
  write_output(o.output, correlation_to_json(correlation_matrix(d), d.schema()).dump(2) + "\n");
  return kExitOk;
}

std::uint64_t env_seed() {
  const char* s = std::getenv("PHISH_SEED");
  if (s == nullptr || *s == '\0') return kDefaultSeed;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("PHISH_SEED is not a non-negative integer: ") + s);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phishing-website feature extraction and classifier comparison"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Options o;

  app.add_option("--config", o.config_path, "JSON file whose keys fill options not given on the command line");
  auto* seed_opt = app.add_option("--seed", o.seed, "RNG seed (default: $PHISH_SEED, else 42)");
  app.add_option("--jobs", o.jobs, "Concurrent folds (1 = serial)")->check(CLI::PositiveNumber);

  auto add_data = [&](CLI::App* s) { s->add_option("--data", o.data, "Dataset CSV"); };
  auto add_output = [&](CLI::App* s) { s->add_option("-o,--output", o.output, "Output file (default stdout)"); };
  auto add_format = [&](CLI::App* s, const std::string& allowed) {
    s->add_option("--format", o.format, "Output format: " + allowed);
  };
  auto add_specs = [&](CLI::App* s) {
    s->add_option("--spec", o.specs, "Classifier spec JSON, e.g. '{\"family\":\"knn\",\"hyperparams\":{\"k\":5}}'");
    s->add_option("--spec-file", o.spec_files, "File with a spec object or an array of specs");
  };
  auto add_extraction = [&](CLI::App* s) {
    s->add_option("--url", o.urls, "URL to extract (repeatable)");
    s->add_option("--html", o.html, "Page HTML file used for the content rules");
    s->add_option("--redirects", o.redirects, "Observed redirect count");
    s->add_option("--evidence", o.evidence, "Evidence JSON keyed by domain");
    s->add_option("--thresholds", o.thresholds, "Extractor threshold JSON");
  };

  auto* summarize_cmd = app.add_subcommand("summarize", "Per-column mean and standard deviation");
  add_data(summarize_cmd);
  add_output(summarize_cmd);
  add_format(summarize_cmd, "text, json");

  auto* crossval_cmd = app.add_subcommand("crossval", "Stratified k-fold cross-validation");
  add_data(crossval_cmd);
  add_output(crossval_cmd);
  add_format(crossval_cmd, "text, json, csv");
  add_specs(crossval_cmd);
  crossval_cmd->add_flag("--all", o.all, "Run the twelve-classifier comparison battery");
  crossval_cmd->add_option("--k", o.k, "Fold count")->check(CLI::Range(2, 1000000));

  auto* sweep_cmd = app.add_subcommand("sweep", "Cross-validate along one hyperparameter axis");
  add_data(sweep_cmd);
  sweep_cmd->add_option("-o,--output", o.output, "Output prefix; writes PREFIX.csv and PREFIX.json");
  sweep_cmd->add_option("--axis", o.axis, "svm-kernel, knn-k or mlp-depth");
  sweep_cmd->add_option("--values", o.values, "Comma-separated axis values");
  sweep_cmd->add_option("--spec", o.specs, "Base classifier spec JSON");
  sweep_cmd->add_option("--k", o.k, "Fold count")->check(CLI::Range(2, 1000000));

  auto* extract_cmd = app.add_subcommand("extract", "Compute the 30 features for URLs or a PhishTank dump");
  add_extraction(extract_cmd);
  add_output(extract_cmd);
  add_format(extract_cmd, "text, json");
  extract_cmd->add_option("--dump", o.dump, "PhishTank CSV dump (URL in the first column)");
  extract_cmd->add_option("--append", o.append, "Append extracted rows to this dataset CSV");
  extract_cmd->add_option("--label", o.label, "Label for appended rows (-1 or 1)")->check(CLI::IsMember({-1, 1}));

  auto* train_cmd = app.add_subcommand("train", "Fit one classifier on a dataset and save it");
  add_data(train_cmd);
  add_specs(train_cmd);
  train_cmd->add_option("--model", o.model, "Model file to write");

  auto* predict_cmd = app.add_subcommand("predict", "Apply a saved model to a dataset or URLs");
  predict_cmd->add_option("--model", o.model, "Model file from `train`");
  add_data(predict_cmd);
  add_extraction(predict_cmd);
  add_output(predict_cmd);

  auto* report_cmd = app.add_subcommand("report", "Re-render a saved JSON report");
  report_cmd->add_option("--input", o.input, "Report JSON from crossval --format json");
  add_output(report_cmd);
  add_format(report_cmd, "text, json, csv");

  auto* correlate_cmd = app.add_subcommand("correlate", "Feature/label correlation matrix as JSON");
  add_data(correlate_cmd);
  add_output(correlate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    bool seed_from_config = false;
    if (!o.config_path.empty()) {
      const json cfg = json::parse(slurp(o.config_path), nullptr, false);
      if (cfg.is_discarded() || !cfg.is_object()) throw UsageError(o.config_path + ": config must be a JSON object");
      ConfigMerge m(cfg, {sub, &app});
      m.apply("--seed", "seed", o.seed);
      seed_from_config = cfg.contains("seed");
      m.apply("--jobs", "jobs", o.jobs);
      for (auto [flag, key, target] : std::initializer_list<std::tuple<const char*, const char*, std::string*>>{
               {"--data", "data", &o.data},
               {"--format", "format", &o.format},
               {"--output", "output", &o.output},
               {"--axis", "axis", &o.axis},
               {"--values", "values", &o.values},
               {"--dump", "dump", &o.dump},
               {"--html", "html", &o.html},
               {"--evidence", "evidence", &o.evidence},
               {"--thresholds", "thresholds", &o.thresholds},
               {"--append", "append", &o.append},
               {"--model", "model", &o.model},
               {"--input", "input", &o.input}})
        m.apply(flag, key, *target);
      m.apply("--k", "k", o.k);
      m.apply("--all", "all", o.all);
      m.apply("--url", "url", o.urls);
      m.apply("--redirects", "redirects", o.redirects);
      m.apply("--label", "label", o.label);
      m.apply("--spec-file", "spec_file", o.spec_files);
      // "spec" may hold one spec object or an array of them.
      json specs;
      m.apply("--spec", "spec", specs);
      if (!specs.is_null())
        for (const auto& s : specs.is_array() ? specs : json::array({specs})) o.specs.push_back(s.dump());
      m.finish();
    }
    if (seed_opt->count() == 0 && !seed_from_config) o.seed = env_seed();
    if (o.k < 2) throw UsageError("--k must be at least 2");

    const std::string name = sub->get_name();
    if (name == "summarize") return cmd_summarize(o);
    if (name == "crossval") return cmd_crossval(o);
    if (name == "sweep") return cmd_sweep(o);
    if (name == "extract") return cmd_extract(o);
    if (name == "train") return cmd_train(o);
    if (name == "predict") return cmd_predict(o);
    if (name == "report") return cmd_report(o);
    if (name == "correlate") return cmd_correlate(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\nrun '" << sub->get_name() << " --help' for usage\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
