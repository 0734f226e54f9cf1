#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishml/dataset.hpp"
#include "support.hpp"

using namespace phishml;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Workdir {
 public:
  Workdir() : dir_(fs::temp_directory_path() / ("phishml_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

  Run run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " " + PHISHML_CLI + " " + args + " >" + (dir_ / "out").string() + " 2>" +
                            (dir_ / "err").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir_ / "out"), slurp(dir_ / "err")};
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

 private:
  fs::path dir_;
};

const Workdir& work() {
  static const Workdir w;
  return w;
}

std::string data_path() {
  static const std::string path = [] {
    const auto p = work() / "data.csv";
    save_csv(p, test::random_dataset(120, 81, 0.4));
    return p.string();
  }();
  return path;
}

}  // namespace

TEST_CASE("summarize prints every column") {
  const Run r = work().run("summarize --data " + data_path());
  CHECK(r.code == 0);
  CHECK(r.out.find("Statistical Report") != std::string::npos);
  CHECK(r.out.find("Result") != std::string::npos);
  const Run j = work().run("summarize --format json --data " + data_path());
  CHECK(nlohmann::json::parse(j.out).size() == kFeatureCount + 1);
}

TEST_CASE("summarize on an empty dataset is a usage error") {
  std::string header;
  for (const auto& n : FeatureSchema::canonical().names()) header += n + ",";
  work().write("empty.csv", header + "Result\n");
  CHECK(work().run("summarize --data " + (work() / "empty.csv").string()).code == 2);
}

TEST_CASE("crossval output is reproducible apart from timing") {
  const std::string args = "crossval --k 4 --seed 5 --format json --spec '{\"family\":\"knn\"}' --data " + data_path();
  const Run a = work().run(args);
  const Run b = work().run(args);
  REQUIRE(a.code == 0);
  const auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
  CHECK(ja["runs"] == jb["runs"]);
  CHECK(ja["runs"][0]["seed"] == 5);
}

TEST_CASE("seed precedence: flag, config, environment, default") {
  const std::string base = "crossval --k 3 --format json --spec '{\"family\":\"tree\"}' --data " + data_path();
  auto seed_of = [](const Run& r) { return nlohmann::json::parse(r.out)["runs"][0]["seed"].get<int>(); };
  CHECK(seed_of(work().run(base)) == 42);
  CHECK(seed_of(work().run(base, "PHISH_SEED=7")) == 7);
  work().write("cfg.json", R"({"seed": 8})");
  CHECK(seed_of(work().run("--config " + (work() / "cfg.json").string() + " " + base, "PHISH_SEED=7")) == 8);
  CHECK(seed_of(work().run("--seed 9 --config " + (work() / "cfg.json").string() + " " + base, "PHISH_SEED=7")) == 9);
  CHECK(work().run(base, "PHISH_SEED=abc").code == 2);
}

TEST_CASE("config files fill unset options and reject unknown keys") {
  work().write("cfg2.json", R"({"k": 3, "format": "csv", "spec": {"family": "knn", "hyperparams": {"k": 1}}})");
  const Run r = work().run("--config " + (work() / "cfg2.json").string() + " crossval --data " + data_path());
  CHECK(r.code == 0);
  CHECK(r.out.rfind("classifier,train_time_s", 0) == 0);
  work().write("cfg3.json", R"({"bogus": 1})");
  CHECK(work().run("--config " + (work() / "cfg3.json").string() + " crossval --all --data " + data_path()).code == 2);
}

TEST_CASE("usage errors exit 2") {
  CHECK(work().run("").code == 2);
  CHECK(work().run("crossval --spec '{\"family\":\"bayes\"}' --data " + data_path()).code == 2);
  CHECK(work().run("crossval --data " + data_path()).code == 2);
  CHECK(work().run("crossval --all --format xml --data " + data_path()).code == 2);
  CHECK(work().run("summarize --data /nonexistent.csv").code == 2);
  CHECK(work().run("sweep --axis depth --data " + data_path()).code == 2);
}

TEST_CASE("non-convergence exits 3 and marks the table") {
  const Run r = work().run(
      "crossval --k 3 --spec '{\"family\":\"svm\",\"hyperparams\":{\"kernel\":\"linear\",\"max_passes\":1}}' --data " +
      data_path());
  CHECK(r.code == 3);
  CHECK(r.out.find("svm-linear *") != std::string::npos);
}

TEST_CASE("sweep writes CSV and JSON") {
  const auto prefix = (work() / "sweep").string();
  const Run r = work().run("sweep --axis knn-k --values 1,3,5 --k 3 --data " + data_path() + " -o " + prefix);
  CHECK(r.code == 0);
  const std::string csv = slurp(prefix + ".csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(nlohmann::json::parse(slurp(prefix + ".json"))["axis"]["values"].size() == 3);
}

TEST_CASE("extract prints named features and appends rows") {
  const Run r = work().run("extract --url http://217.102.24.235/sample.html");
  CHECK(r.code == 0);
  CHECK(r.out.find("Having_IP_Address=-1\n") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '=') == kFeatureCount);

  const auto appended = work() / "appended.csv";
  CHECK(work().run("extract --url https://example.com/ --url http://bit.ly/x --label 1 --append " + appended.string()).code == 0);
  CHECK(load_csv(appended).size() == 2);
  CHECK(load_csv(appended).label(0) == Label::Legitimate);
}

TEST_CASE("extract error exits") {
  CHECK(work().run("extract --url http://example.com/ --evidence /nonexistent.json").code == 2);
  CHECK(work().run("extract --url ''").code == 4);
  work().write("bad_dump.csv", "url\n\"\",x\n");
  CHECK(work().run("extract --dump " + (work() / "bad_dump.csv").string()).code == 4);
  const Run partial = work().run("extract --dump " + test::fixture("extract/phishtank_dump.csv").string());
  CHECK(partial.code == 0);
  CHECK(partial.err.find("error:") != std::string::npos);
}

TEST_CASE("train then predict") {
  const auto model = (work() / "model.json").string();
  work().write("pair.csv", [] {
    std::string s;
    for (const auto& n : FeatureSchema::canonical().names()) s += n + ",";
    s += "Result\n";
    for (int v : {1, -1}) {
      for (int i = 0; i < kFeatureCount; ++i) s += std::to_string(v) + ",";
      s += std::to_string(v) + "\n";
    }
    return s;
  }());
  const auto pair = (work() / "pair.csv").string();
  CHECK(work().run("train --spec '{\"family\":\"svm\",\"hyperparams\":{\"kernel\":\"linear\"}}' --data " + pair +
                   " --model " + model).code == 0);
  const Run r = work().run("predict --model " + model + " --data " + pair);
  CHECK(r.code == 0);
  CHECK(r.out.find("1\tlegitimate\t") != std::string::npos);
  CHECK(r.out.find("2\tphishing\t") != std::string::npos);
  CHECK(work().run("predict --model " + model + " --url http://217.102.24.235/x").code == 0);

  work().write("corrupt.json", "{\"format\": \"phishml-model\",");
  const Run bad = work().run("predict --model " + (work() / "corrupt.json").string() + " --data " + pair);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("byte") != std::string::npos);
}

TEST_CASE("report re-renders saved JSON") {
  const auto saved = (work() / "report.json").string();
  CHECK(work().run("crossval --k 3 --format json --spec '{\"family\":\"tree\"}' --data " + data_path() + " -o " + saved).code == 0);
  const Run r = work().run("report --format csv --input " + saved);
  CHECK(r.code == 0);
  CHECK(r.out.rfind("classifier,", 0) == 0);
}

TEST_CASE("correlate emits a 31 by 31 matrix") {
  const Run r = work().run("correlate --data " + data_path());
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["columns"].size() == kFeatureCount + 1);
  CHECK(j["matrix"].size() == kFeatureCount + 1);
}
