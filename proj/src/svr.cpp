#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"

namespace walkcast::models {

double svr_objective(std::span<const double> w, double b, const num::Matrix& X,
                     std::span<const double> y_scaled, double c, double epsilon) {
  double reg = 0.0;
  for (double wj : w) reg += wj * wj;
  double hinge = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto row = X.row_span(i);
    double pred = b;
    for (std::size_t j = 0; j < row.size(); ++j) pred += w[j] * row[j];
    hinge += std::max(0.0, std::abs(pred - y_scaled[i]) - epsilon);
  }
  return 0.5 * reg + c * hinge;
}

TrainedModel fit_svr(const features::SupervisedSet& data,
                     const features::ScalerParams& scaler, double epsilon, double c,
                     int epochs, double lr0) {
  if (!(epsilon >= 0.0)) throw ConfigError("fit_svr: epsilon must be >= 0");
  if (!(c >= 0.0)) throw ConfigError("fit_svr: c must be >= 0");
  if (epochs < 0) throw ConfigError("fit_svr: epochs must be >= 0");
  if (lr0 < 0.0) throw ConfigError("fit_svr: lr0 must be >= 0");
  const std::size_t n = data.X.rows();
  if (n < 2) throw ValidationError("fit_svr: need at least 2 rows");
  const std::size_t d = data.X.cols();

  // Targets live in the scaled-open domain; with features in [0, 1] the
  // subgradient magnitude is O(1 + c*n), which sets the default step scale.
  std::vector<double> y_scaled(n);
  for (std::size_t i = 0; i < n; ++i)
    y_scaled[i] = features::scale_open(data.y[i], scaler);

  if (lr0 == 0.0) lr0 = 1.0 / (1.0 + c * static_cast<double>(n));

  std::vector<double> w(d, 0.0);
  double b = 0.0;

  std::vector<double> best_w = w;
  double best_b = b;
  double best_obj = svr_objective(w, b, data.X, y_scaled, c, epsilon);

  std::vector<double> grad_w(d);
  for (int t = 0; t < epochs; ++t) {
    std::copy(w.begin(), w.end(), grad_w.begin());  // d(0.5||w||^2)/dw = w
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = data.X.row_span(i);
      double pred = b;
      for (std::size_t j = 0; j < d; ++j) pred += w[j] * row[j];
      const double r = pred - y_scaled[i];
      if (std::abs(r) <= epsilon) continue;  // inside the tube: no loss term
      const double sign = r > 0.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < d; ++j) grad_w[j] += c * sign * row[j];
      grad_b += c * sign;
    }

    // Harmonic step decay; the quadratic regularizer keeps the objective
    // strongly convex, so tracking the best iterate converges despite the
    // hinge kinks.
    const double step = lr0 / static_cast<double>(t + 1);
    for (std::size_t j = 0; j < d; ++j) w[j] -= step * grad_w[j];
    b -= step * grad_b;

    const double obj = svr_objective(w, b, data.X, y_scaled, c, epsilon);
    if (!std::isfinite(obj))
      throw DivergenceError(
          "fit_svr: non-finite objective at epoch " + std::to_string(t), t);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
      best_b = b;
    }
  }

  TrainedModel model;
  model.spec.family = Family::svr;
  model.spec.hyper = {{"epsilon", epsilon},
                      {"c", c},
                      {"epochs", static_cast<double>(epochs)},
                      {"lr0", lr0}};
  model.scaler = scaler;
  model.input_width = data.X.cols();
  SvrParams p;
  p.w = std::move(best_w);
  p.b = best_b;
  model.params = std::move(p);
  return model;
}

}  // namespace walkcast::models
