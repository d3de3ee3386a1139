#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"
#include "walkcast/features.hpp"
#include "walkcast/rng.hpp"
#include "walkcast/serialize.hpp"

using namespace walkcast;
using namespace walkcast::models;

namespace {

// Open extrema covering the toy targets so the internal target scaling is a
// well-defined affine map.
features::ScalerParams toy_scaler(double open_min = 0.0, double open_max = 10.0) {
  features::ScalerParams scaler;
  scaler.open = {open_min, open_max};
  return scaler;
}

features::SupervisedSet linear_set(std::uint64_t seed, std::size_t rows,
                                   std::size_t cols) {
  Rng rng(seed);
  features::SupervisedSet set;
  set.X = num::Matrix(rows, cols);
  set.y.resize(rows);
  set.lag = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) set.X(i, j) = rng.uniform(0.0, 1.0);
    set.y[i] = 3.0 * set.X(i, 0) + 1.0;
  }
  return set;
}

double variance(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

double model_mse(const TrainedModel& model, const features::SupervisedSet& data) {
  auto pred = predict(model, data.X);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double d = pred[i] - data.y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

}  // namespace

// ---- artificial neural network -------------------------------------------------

TEST_CASE("ann: zero epochs returns the seeded initialization unchanged") {
  auto data = linear_set(1, 40, 5);
  auto scaler = toy_scaler();
  auto a = fit_ann(data, scaler, /*seed=*/42, /*hidden=*/8, /*epochs=*/0, 8, 0.001);
  auto b = fit_ann(data, scaler, 42, 8, 0, 8, 0.001);
  CHECK(serialize::to_json(a) == serialize::to_json(b));

  // predictions are exactly the forward pass of the initial parameters
  const auto& params = std::get<AnnParams>(a.params);
  auto pred = predict(a, data.X);
  for (std::size_t i = 0; i < data.X.rows(); ++i) {
    double scaled = ann_forward_scaled(params, data.X.row_span(i));
    CHECK(pred[i] == features::invert_open_scale(scaled, scaler));
  }

  auto c = fit_ann(data, scaler, 43, 8, 0, 8, 0.001);
  CHECK(serialize::to_json(a) != serialize::to_json(c));
}

TEST_CASE("ann: batch gradients match central finite differences") {
  // Two hidden units, three inputs; biases keep every pre-activation away
  // from the relu kink so the finite-difference probe stays on one branch.
  const std::size_t hidden = 2, d = 3, n = 6;
  AnnParams p;
  p.w1 = num::Matrix(hidden, d);
  p.b1 = num::Matrix(hidden, 1);
  p.w2 = num::Matrix(1, hidden);
  p.b2 = num::Matrix(1, 1);
  Rng rng(7);
  for (std::size_t h = 0; h < hidden; ++h) {
    for (std::size_t j = 0; j < d; ++j) p.w1(h, j) = rng.uniform(-0.5, 0.5);
    p.b1(h, 0) = h == 0 ? 0.8 : -0.9;
    p.w2(0, h) = rng.uniform(-0.5, 0.5);
  }
  p.b2(0, 0) = 0.1;

  num::Matrix X(n, d);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X(i, j) = rng.uniform(0.0, 0.3);
    y[i] = rng.uniform(0.0, 1.0);
  }
  std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5};

  AnnGrads g;
  g.w1 = num::Matrix(hidden, d);
  g.b1 = num::Matrix(hidden, 1);
  g.w2 = num::Matrix(1, hidden);
  g.b2 = num::Matrix(1, 1);
  (void)ann_batch_loss_and_grads(p, X, y, rows, g);

  auto loss_with = [&](const AnnParams& q) {
    double acc = 0.0;
    for (std::size_t i : rows) {
      double r = ann_forward_scaled(q, X.row_span(i)) - y[i];
      acc += r * r;
    }
    return acc / static_cast<double>(rows.size());
  };

  struct Slot {
    num::Matrix AnnParams::* param;
    num::Matrix AnnGrads::* grad;
  };
  const Slot slots[] = {{&AnnParams::w1, &AnnGrads::w1},
                        {&AnnParams::b1, &AnnGrads::b1},
                        {&AnnParams::w2, &AnnGrads::w2},
                        {&AnnParams::b2, &AnnGrads::b2}};
  for (const auto& slot : slots) {
    num::Matrix numeric = num::finite_diff_gradient(
        [&](const num::Matrix& tensor) {
          AnnParams q = p;
          q.*(slot.param) = tensor;
          return loss_with(q);
        },
        p.*(slot.param));
    const num::Matrix& analytic = g.*(slot.grad);
    REQUIRE(numeric.same_shape(analytic));
    for (std::size_t i = 0; i < numeric.rows(); ++i) {
      for (std::size_t j = 0; j < numeric.cols(); ++j) {
        double denom = std::max({1e-8, std::abs(numeric(i, j)), std::abs(analytic(i, j))});
        CHECK(std::abs(numeric(i, j) - analytic(i, j)) / denom < 1e-4);
      }
    }
  }
}

TEST_CASE("ann: learns an affine target to under 1% of target variance") {
  auto data = linear_set(2, 128, 5);
  auto scaler = toy_scaler(0.0, 5.0);
  auto model = fit_ann(data, scaler, /*seed=*/42, /*hidden=*/16, /*epochs=*/200,
                       /*batch=*/32, 0.01);
  CHECK(model_mse(model, data) < 0.01 * variance(data.y));
}

TEST_CASE("ann: batch larger than the sample is a size error") {
  auto data = linear_set(3, 10, 5);
  CHECK_THROWS_AS((void)fit_ann(data, toy_scaler(), 1, 4, 10, 16, 0.001),
                  ValidationError);
}

TEST_CASE("ann: non-finite loss raises a divergence error naming the epoch") {
  // ADAM's per-step movement is bounded by the learning rate, so overflowing
  // 64-bit range requires a step size that pushes the forward pass past
  // double range in one update.
  auto data = linear_set(4, 64, 5);
  try {
    (void)fit_ann(data, toy_scaler(), 1, 32, 5, 8, 1e200);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    CHECK(e.epoch() >= 0);
  }
}

// ---- support vector regression ---------------------------------------------------

TEST_CASE("svr: targets inside the tube leave a pure regularizer objective") {
  // y stays within epsilon of the constant 0.5 in scaled space, so w = 0 with
  // b = 0.5 is feasible with zero hinge loss and zero objective.
  Rng rng(11);
  features::SupervisedSet data;
  data.X = num::Matrix(40, 3);
  data.y.resize(40);
  auto scaler = toy_scaler(0.0, 10.0);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 3; ++j) data.X(i, j) = rng.uniform(0.0, 1.0);
    // scaled targets in [0.47, 0.53]; raw = scaled * 10
    data.y[i] = 10.0 * (0.5 + 0.03 * rng.uniform(-1.0, 1.0));
  }
  auto model = fit_svr(data, scaler, /*epsilon=*/0.1, /*c=*/1.0, /*epochs=*/800);
  const auto& params = std::get<SvrParams>(model.params);

  std::vector<double> y_scaled(40);
  for (std::size_t i = 0; i < 40; ++i)
    y_scaled[i] = features::scale_open(data.y[i], scaler);
  double objective = svr_objective(params.w, params.b, data.X, y_scaled, 1.0, 0.1);
  double w_norm2 = 0.0;
  for (double v : params.w) w_norm2 += v * v;

  // every residual sits inside the tube, so the hinge term is exactly zero
  // and the objective reduces to the regularizer alone
  for (std::size_t i = 0; i < 40; ++i) {
    double pred = params.b;
    for (std::size_t j = 0; j < 3; ++j) pred += params.w[j] * data.X(i, j);
    CHECK(std::abs(pred - y_scaled[i]) <= 0.1);
  }
  CHECK(objective == doctest::Approx(0.5 * w_norm2).epsilon(1e-12));
}

TEST_CASE("svr: c = 0 collapses to the constant-b predictor with vanishing w") {
  auto data = linear_set(12, 50, 4);
  auto scaler = toy_scaler();
  auto model = fit_svr(data, scaler, 0.01, /*c=*/0.0, 300, 0.5);
  const auto& params = std::get<SvrParams>(model.params);
  for (double v : params.w) CHECK(std::abs(v) < 1e-6);
  auto pred = predict(model, data.X);
  for (double p : pred) {
    CHECK(p == doctest::Approx(features::invert_open_scale(params.b, scaler)));
  }
}

TEST_CASE("svr: returned objective is no worse than the least-squares point") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    auto data = linear_set(100 + static_cast<std::uint64_t>(trial), 80, 3);
    // jitter the targets so neither fit is exact
    for (auto& v : data.y) v += 0.2 * rng.uniform(-1.0, 1.0);
    auto scaler = toy_scaler(0.0, 5.0);
    const double epsilon = 0.01, c = 1.0;

    auto model = fit_svr(data, scaler, epsilon, c, 2000);
    const auto& params = std::get<SvrParams>(model.params);

    std::vector<double> y_scaled(data.y.size());
    for (std::size_t i = 0; i < data.y.size(); ++i)
      y_scaled[i] = features::scale_open(data.y[i], scaler);

    // least-squares reference point in the same scaled space
    features::SupervisedSet scaled_set;
    scaled_set.X = data.X;
    scaled_set.y = y_scaled;
    auto ols = fit_ols(scaled_set, scaler);
    const auto& lin = std::get<OlsParams>(ols.params);

    double svr_value =
        svr_objective(params.w, params.b, data.X, y_scaled, c, epsilon);
    double ols_value =
        svr_objective(lin.coef, lin.intercept, data.X, y_scaled, c, epsilon);
    CHECK(svr_value <= ols_value + 1e-9);
  }
}

TEST_CASE("svr: dispatch passes hyperparameters and rejects unknown keys") {
  auto data = linear_set(14, 30, 5);
  auto scaler = toy_scaler();
  ModelSpec spec;
  spec.family = Family::svr;
  spec.hyper = {{"epsilon", 0.05}, {"c", 2.0}, {"epochs", 50.0}, {"lr0", 0.1}};
  auto via_dispatch = fit(spec, data, scaler);
  auto direct = fit_svr(data, scaler, 0.05, 2.0, 50, 0.1);
  CHECK(predict(via_dispatch, data.X) == predict(direct, data.X));

  spec.hyper["gamma"] = 1.0;
  CHECK_THROWS_AS((void)fit(spec, data, scaler), ConfigError);
}
