#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"

namespace walkcast::models {

namespace {

using num::Matrix;

Matrix uniform_init(std::size_t rows, std::size_t cols, Rng& rng) {
  // Symmetric uniform scaled by fan-in keeps early activations well inside
  // the linear region regardless of layer width.
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Matrix w(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) w(i, j) = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

double ann_forward_scaled(const AnnParams& p, std::span<const double> x) {
  const std::size_t hidden = p.w1.rows();
  double out = p.b2(0, 0);
  for (std::size_t h = 0; h < hidden; ++h) {
    double z = p.b1(h, 0);
    for (std::size_t j = 0; j < x.size(); ++j) z += p.w1(h, j) * x[j];
    out += p.w2(0, h) * std::max(z, 0.0);
  }
  return out;
}

double ann_batch_loss_and_grads(const AnnParams& p, const num::Matrix& X,
                                std::span<const double> y_scaled,
                                std::span<const std::size_t> rows, AnnGrads& g) {
  const std::size_t batch = rows.size();
  const std::size_t hidden = p.w1.rows();
  const std::size_t d = X.cols();

  double loss = 0.0;
  std::vector<double> z(hidden);
  std::vector<double> a(hidden);
  for (std::size_t r : rows) {
    const auto x = X.row_span(r);
    double pred = p.b2(0, 0);
    for (std::size_t h = 0; h < hidden; ++h) {
      double zh = p.b1(h, 0);
      for (std::size_t j = 0; j < d; ++j) zh += p.w1(h, j) * x[j];
      z[h] = zh;
      a[h] = std::max(zh, 0.0);
      pred += p.w2(0, h) * a[h];
    }
    const double err = pred - y_scaled[r];
    loss += err * err;

    // The 1/batch factor is folded into each sample's contribution so the
    // accumulated gradients equal d(mean squared error)/d(params).
    const double dpred = 2.0 * err / static_cast<double>(batch);
    g.b2(0, 0) += dpred;
    for (std::size_t h = 0; h < hidden; ++h) {
      g.w2(0, h) += dpred * a[h];
      // relu'(0) = 0 by convention, matching act_grad.
      if (z[h] > 0.0) {
        const double dz = dpred * p.w2(0, h);
        g.b1(h, 0) += dz;
        for (std::size_t j = 0; j < d; ++j) g.w1(h, j) += dz * x[j];
      }
    }
  }
  return loss / static_cast<double>(batch);
}

TrainedModel fit_ann(const features::SupervisedSet& data,
                     const features::ScalerParams& scaler, std::uint64_t seed,
                     int hidden, int epochs, int batch, double lr) {
  if (hidden < 1) throw ConfigError("fit_ann: hidden must be >= 1");
  if (epochs < 0) throw ConfigError("fit_ann: epochs must be >= 0");
  if (batch < 1) throw ConfigError("fit_ann: batch must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("fit_ann: lr must be > 0");
  const std::size_t n = data.X.rows();
  if (n < static_cast<std::size_t>(batch))
    throw ValidationError("fit_ann: need at least batch (" + std::to_string(batch) +
                          ") rows, got " + std::to_string(n));

  Rng rng(seed);
  AnnParams p;
  p.w1 = uniform_init(static_cast<std::size_t>(hidden), data.X.cols(), rng);
  p.b1 = Matrix(static_cast<std::size_t>(hidden), 1);
  p.w2 = uniform_init(1, static_cast<std::size_t>(hidden), rng);
  p.b2 = Matrix(1, 1);

  // Targets are trained in the scaled-open domain so the loss surface is
  // O(1) regardless of the price level; predict() inverts the scaling.
  std::vector<double> y_scaled(n);
  for (std::size_t i = 0; i < n; ++i)
    y_scaled[i] = features::scale_open(data.y[i], scaler);

  num::AdamState opt_w1(p.w1.rows(), p.w1.cols(), lr);
  num::AdamState opt_b1(p.b1.rows(), p.b1.cols(), lr);
  num::AdamState opt_w2(p.w2.rows(), p.w2.cols(), lr);
  num::AdamState opt_b2(p.b2.rows(), p.b2.cols(), lr);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  AnnGrads g;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(batch));
      std::span<const std::size_t> rows{order.data() + start, stop - start};
      g.w1 = Matrix(p.w1.rows(), p.w1.cols());
      g.b1 = Matrix(p.b1.rows(), p.b1.cols());
      g.w2 = Matrix(p.w2.rows(), p.w2.cols());
      g.b2 = Matrix(p.b2.rows(), p.b2.cols());
      const double loss = ann_batch_loss_and_grads(p, data.X, y_scaled, rows, g);
      if (!std::isfinite(loss))
        throw DivergenceError(
            "fit_ann: non-finite loss at epoch " + std::to_string(epoch), epoch,
            static_cast<int>(start / static_cast<std::size_t>(batch)));
      num::adam_step(p.w1, g.w1, opt_w1);
      num::adam_step(p.b1, g.b1, opt_b1);
      num::adam_step(p.w2, g.w2, opt_w2);
      num::adam_step(p.b2, g.b2, opt_b2);
    }
  }

  TrainedModel model;
  model.spec.family = Family::ann;
  model.spec.seed = seed;
  model.spec.hyper = {{"hidden", static_cast<double>(hidden)},
                      {"epochs", static_cast<double>(epochs)},
                      {"batch", static_cast<double>(batch)},
                      {"lr", lr}};
  model.scaler = scaler;
  model.input_width = data.X.cols();
  model.params = std::move(p);
  return model;
}

}  // namespace walkcast::models
