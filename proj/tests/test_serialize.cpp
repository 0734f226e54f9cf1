#include <doctest.h>

#include <filesystem>

#include "phishml/classifier.hpp"
#include "phishml/error.hpp"
#include "phishml/serialize.hpp"
#include "support.hpp"

using namespace phishml;

TEST_CASE("every family survives a save and load") {
  const Dataset d = test::random_dataset(120, 71, 0.4);
  const auto path = std::filesystem::temp_directory_path() / "phishml_test_model.json";
  for (const auto& spec : comparison_battery(2)) {
    CAPTURE(spec.display_name());
    const FitResult r = fit(spec, d);
    save_model(path, r.model, &spec);
    const ModelFile back = load_model(path);
    REQUIRE(back.spec.has_value());
    CHECK(*back.spec == spec);
    CHECK(model_kind(back.model) == model_kind(r.model));
    const VectorXd before = decision_scores(r.model, d.design_matrix<double>());
    const VectorXd after = decision_scores(back.model, d.design_matrix<double>());
    CHECK((before - after).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, before.cwiseAbs().maxCoeff()));
  }
  std::filesystem::remove(path);
}

TEST_CASE("corrupt model files are rejected with a location") {
  try {
    parse_model("{\"format\": \"phishml-model\", \"version\": 1, ");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_model(R"({"format": "phishml-model", "version": 99, "kind": "linear", "model": {}})"), Error);
  CHECK_THROWS_AS(parse_model(R"({"format": "other"})"), Error);
  CHECK_THROWS_AS(parse_model(R"({"format": "phishml-model", "version": 1, "kind": "linear", "model": {"weights": [1, 2], "bias": 0}})"),
                  Error);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), Error);
}

TEST_CASE("invariant violations are caught on load") {
  const Dataset d = test::make_dataset({{1, 1, 1}, {1, -1, -1, -1}});
  SvmParams p;
  p.kernel.kind = KernelKind::Linear;
  TrainedModel m = train_svm_smo(d, p);
  auto j = model_to_json(m);
  j["model"]["alphas"][0] = 5.0;
  CHECK_THROWS_AS(model_from_json(j), Error);
}
