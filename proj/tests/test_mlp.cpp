#include <doctest.h>

#include "oracles.hpp"
#include "phishml/error.hpp"
#include "phishml/mlp.hpp"
#include "support.hpp"

using namespace phishml;

TEST_CASE("MLP gradient matches central differences in smooth mode") {
  const Dataset d = test::random_dataset(40, 51);
  const MatrixXd x = d.design_matrix<double>();
  const VectorXd y = d.label_vector<double>();
  for (const auto& hidden : {std::vector<int>{6}, std::vector<int>{5, 4}}) {
    const MlpModel m = init_mlp(hidden, Activation::Softplus, 3);
    const double l2 = 1e-2;
    auto loss = [&](const VectorXd& theta) { return mlp_loss_and_gradient(test::unflatten(m, theta), x, y, l2).loss; };
    const VectorXd analytic = test::flatten(mlp_loss_and_gradient(m, x, y, l2));
    CHECK(oracle::relative_error(analytic, oracle::numeric_gradient(loss, test::flatten(m))) < 1e-4);
  }
}

TEST_CASE("MLP initialization shapes and bounds") {
  const MlpModel m = init_mlp({30, 10}, Activation::Relu, 8);
  CHECK(m.layer_sizes == std::vector<int>{30, 30, 10, 1});
  REQUIRE(m.weights.size() == 3);
  CHECK(m.weights[0].rows() == 30);
  CHECK(m.weights[1].rows() == 10);
  CHECK(m.weights[1].cols() == 30);
  const double limit = std::sqrt(6.0 / (30 + 10));
  CHECK(m.weights[1].cwiseAbs().maxCoeff() <= limit);
  CHECK(test::flatten(init_mlp({4}, Activation::Relu, 1)) == test::flatten(init_mlp({4}, Activation::Relu, 1)));
}

TEST_CASE("MLP early stopping returns the best validation epoch") {
  const Dataset d = test::random_dataset(600, 52, 0.25);
  MlpParams p;
  p.epochs = 400;
  p.learning_rate = 0.01;
  MlpTrace trace;
  train_mlp(d, p, 4, &trace);
  REQUIRE_FALSE(trace.validation_loss.empty());
  CHECK(trace.stopped_early);
  const auto best = std::min_element(trace.validation_loss.begin(), trace.validation_loss.end());
  CHECK(*best <= trace.validation_loss[static_cast<std::size_t>(trace.best_epoch)] + p.tol);
  CHECK(trace.validation_loss.size() < static_cast<std::size_t>(p.epochs));
}

TEST_CASE("MLP training is a function of the seed") {
  const Dataset d = test::random_dataset(200, 53, 0.4);
  MlpParams p;
  p.epochs = 20;
  CHECK(test::flatten(train_mlp(d, p, 9)) == test::flatten(train_mlp(d, p, 9)));
  CHECK_FALSE(test::flatten(train_mlp(d, p, 9)) == test::flatten(train_mlp(d, p, 10)));
}

TEST_CASE("MLP parameter validation") {
  MlpParams p;
  p.hidden = {};
  CHECK_THROWS_AS(p.validate(), SpecError);
  p = {};
  p.validation_fraction = 1.0;
  CHECK_THROWS_AS(p.validate(), SpecError);
  p = {};
  p.hidden = {30, 0};
  CHECK_THROWS_AS(p.validate(), SpecError);
}
