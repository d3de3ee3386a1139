#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"

namespace walkcast::models {

TrainedModel fit_ols(const features::SupervisedSet& data,
                     const features::ScalerParams& scaler) {
  const std::size_t n = data.X.rows();
  const std::size_t d = data.X.cols();
  if (n <= d + 1)
    throw ValidationError("fit_ols: need more than " + std::to_string(d + 1) +
                          " rows, got " + std::to_string(n));

  num::Matrix design(n, d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (std::size_t j = 0; j < d; ++j) design(i, j + 1) = data.X(i, j);
  }

  // The raw feature set carries an exact dependency by construction (range is
  // high minus low, and an intercept is present), so collinear columns are
  // zeroed out rather than rejected; every least-squares fit predicts the same
  // values and the earliest-column rule keeps the coefficients deterministic.
  std::vector<double> solution;
  try {
    solution = num::lstsq_drop_collinear(design, data.y);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("fit_ols: singular fit: ") + e.what());
  }

  OlsParams params;
  params.intercept = solution[0];
  params.coef.assign(solution.begin() + 1, solution.end());

  TrainedModel model;
  model.spec.family = Family::ols;
  model.scaler = scaler;
  model.input_width = data.X.cols();
  model.params = std::move(params);
  return model;
}

}  // namespace walkcast::models
