#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"

namespace walkcast::models {

double mars_gcv(double mse, std::size_t n_rows, std::size_t n_coef,
                std::size_t n_knots) {
  double eff = static_cast<double>(n_coef) + 3.0 * static_cast<double>(n_knots);
  double n = static_cast<double>(n_rows);
  if (eff >= n) return std::numeric_limits<double>::infinity();
  double denom = 1.0 - eff / n;
  return mse / (denom * denom);
}

namespace {

constexpr double kCollinearTol = 1e-8;

std::vector<double> hinge_column(const num::Matrix& X, int feature, double knot,
                                 bool mirror) {
  std::vector<double> col(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double v = X(i, static_cast<std::size_t>(feature));
    double h = mirror ? knot - v : v - knot;
    col[i] = h > 0.0 ? h : 0.0;
  }
  return col;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Removes the projection of col onto the orthonormal columns in q; returns
// the squared norm left over.
double orthogonalize(std::vector<double>& col, const std::vector<std::vector<double>>& q) {
  for (const auto& qc : q) {
    double proj = dot(col, qc);
    for (std::size_t i = 0; i < col.size(); ++i) col[i] -= proj * qc[i];
  }
  return dot(col, col);
}

std::size_t count_knot_sites(std::span<const HingeBasis> basis) {
  std::set<std::pair<int, double>> sites;
  for (const auto& b : basis) sites.insert({b.feature, b.knot});
  return sites.size();
}

struct RefitResult {
  double intercept = 0.0;
  std::vector<double> coef;
  double mse = 0.0;
};

RefitResult refit_least_squares(const num::Matrix& X, std::span<const double> y,
                                std::span<const HingeBasis> basis) {
  const std::size_t n = X.rows();
  num::Matrix design(n, basis.size() + 1);
  for (std::size_t i = 0; i < n; ++i) design(i, 0) = 1.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    auto col = hinge_column(X, basis[j].feature, basis[j].knot, basis[j].mirror);
    for (std::size_t i = 0; i < n; ++i) design(i, j + 1) = col[i];
  }
  // A forgiving pivot tolerance; the forward pass already rejects collinear
  // columns, this only guards against borderline conditioning.
  auto sol = num::householder_lstsq(design, y, 1e-13);
  RefitResult r;
  r.intercept = sol[0];
  r.coef.assign(sol.begin() + 1, sol.end());
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = r.intercept;
    for (std::size_t j = 0; j < basis.size(); ++j) pred += r.coef[j] * design(i, j + 1);
    double d = y[i] - pred;
    sse += d * d;
  }
  r.mse = sse / static_cast<double>(n);
  return r;
}

std::vector<HingeBasis> forward_pass(const num::Matrix& X, std::span<const double> y,
                                     int max_terms) {
  const std::size_t n = X.rows();
  std::vector<HingeBasis> basis;

  // Orthonormal expansion of the current design; the residual r tracks
  // y minus its projection, so candidate scoring is O(n * m) per knot.
  std::vector<std::vector<double>> q;
  {
    std::vector<double> ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
    q.push_back(std::move(ones));
  }
  std::vector<double> resid(y.begin(), y.end());
  {
    double proj = dot(resid, q[0]);
    for (std::size_t i = 0; i < n; ++i) resid[i] -= proj * q[0][i];
  }
  double sse = dot(resid, resid);
  const double sse_floor = std::max(1e-12 * sse, 1e-24);

  // Distinct observed values per feature, ascending.
  const int n_features = static_cast<int>(X.cols());
  std::vector<std::vector<double>> knots(static_cast<std::size_t>(n_features));
  for (int f = 0; f < n_features; ++f) {
    auto& k = knots[static_cast<std::size_t>(f)];
    k.reserve(n);
    for (std::size_t i = 0; i < n; ++i) k.push_back(X(i, static_cast<std::size_t>(f)));
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
  }

  while (static_cast<int>(q.size()) + 2 <= max_terms && sse > sse_floor) {
    int best_f = -1;
    double best_knot = 0.0;
    double best_reduction = 0.0;

    for (int f = 0; f < n_features; ++f) {
      for (double c : knots[static_cast<std::size_t>(f)]) {
        auto u = hinge_column(X, f, c, false);
        auto v = hinge_column(X, f, c, true);
        double u_raw = dot(u, u), v_raw = dot(v, v);

        double reduction = 0.0;
        double un2 = orthogonalize(u, q);
        std::vector<double> qu;
        if (un2 > kCollinearTol * kCollinearTol * u_raw && un2 > 0.0) {
          double inv = 1.0 / std::sqrt(un2);
          qu = u;
          for (double& x : qu) x *= inv;
          double proj = dot(qu, resid);
          reduction += proj * proj;
        }
        double vn2 = orthogonalize(v, q);
        if (!qu.empty()) {
          double proj = dot(v, qu);
          for (std::size_t i = 0; i < n; ++i) v[i] -= proj * qu[i];
          vn2 = dot(v, v);
        }
        if (vn2 > kCollinearTol * kCollinearTol * v_raw && vn2 > 0.0) {
          double inv = 1.0 / std::sqrt(vn2);
          double proj = 0.0;
          for (std::size_t i = 0; i < n; ++i) proj += v[i] * inv * resid[i];
          reduction += proj * proj;
        }
        // Strict improvement keeps the first (feature, knot) on ties.
        if (reduction > best_reduction + sse_floor) {
          best_reduction = reduction;
          best_f = f;
          best_knot = c;
        }
      }
    }

    if (best_f < 0) break;

    // Commit the winning pair, dropping any collinear half.
    for (bool mirror : {false, true}) {
      auto col = hinge_column(X, best_f, best_knot, mirror);
      double raw = dot(col, col);
      double n2 = orthogonalize(col, q);
      if (n2 <= kCollinearTol * kCollinearTol * raw || n2 <= 0.0) continue;
      double inv = 1.0 / std::sqrt(n2);
      for (double& x : col) x *= inv;
      double proj = dot(col, resid);
      for (std::size_t i = 0; i < n; ++i) resid[i] -= proj * col[i];
      sse -= proj * proj;
      q.push_back(std::move(col));
      basis.push_back(HingeBasis{best_f, best_knot, mirror});
    }
    sse = std::max(sse, 0.0);
  }
  return basis;
}

MarsParams prune_backward(const num::Matrix& X, std::span<const double> y,
                          std::vector<HingeBasis> basis) {
  const std::size_t n = X.rows();
  auto evaluate = [&](std::span<const HingeBasis> b) {
    RefitResult r = refit_least_squares(X, y, b);
    double g = mars_gcv(r.mse, n, b.size() + 1, count_knot_sites(b));
    return std::pair<RefitResult, double>(std::move(r), g);
  };

  auto [best_fit, best_gcv] = evaluate(basis);
  std::vector<HingeBasis> best_basis = basis;

  std::vector<HingeBasis> current = basis;
  while (!current.empty()) {
    double step_best_gcv = std::numeric_limits<double>::infinity();
    std::size_t step_best_j = 0;
    for (std::size_t j = 0; j < current.size(); ++j) {
      std::vector<HingeBasis> trial = current;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(j));
      auto [fit_j, gcv_j] = evaluate(trial);
      if (gcv_j < step_best_gcv) {  // first minimum wins on ties
        step_best_gcv = gcv_j;
        step_best_j = j;
      }
    }
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(step_best_j));
    auto [fit_c, gcv_c] = evaluate(current);
    if (gcv_c < best_gcv) {
      best_gcv = gcv_c;
      best_basis = current;
    }
  }

  RefitResult final_fit = refit_least_squares(X, y, best_basis);
  MarsParams params;
  params.intercept = final_fit.intercept;
  params.basis = std::move(best_basis);
  params.coef = std::move(final_fit.coef);
  params.train_mse = final_fit.mse;
  params.gcv = mars_gcv(final_fit.mse, n, params.basis.size() + 1,
                        count_knot_sites(params.basis));
  return params;
}

TrainedModel package_mars(MarsParams params, const features::ScalerParams& scaler,
                          std::size_t input_width, int max_terms, bool prune) {
  TrainedModel model;
  model.spec.family = Family::mars;
  model.spec.hyper = {{"max_terms", static_cast<double>(max_terms)},
                      {"prune", prune ? 1.0 : 0.0}};
  model.scaler = scaler;
  model.input_width = input_width;
  model.params = std::move(params);
  return model;
}

}  // namespace

TrainedModel fit_mars(const features::SupervisedSet& data,
                      const features::ScalerParams& scaler, int max_terms,
                      bool prune) {
  if (data.X.rows() < 10)
    throw ValidationError("fit_mars: need at least 10 rows, got " +
                          std::to_string(data.X.rows()));
  if (max_terms < 1) throw ConfigError("fit_mars: max_terms must be >= 1");

  auto basis = forward_pass(data.X, data.y, max_terms);
  MarsParams params;
  if (prune) {
    params = prune_backward(data.X, data.y, std::move(basis));
  } else {
    RefitResult fit = refit_least_squares(data.X, data.y, basis);
    params.intercept = fit.intercept;
    params.coef = std::move(fit.coef);
    params.train_mse = fit.mse;
    params.gcv = mars_gcv(fit.mse, data.X.rows(), basis.size() + 1,
                          count_knot_sites(basis));
    params.basis = std::move(basis);
  }
  return package_mars(std::move(params), scaler, data.X.cols(), max_terms, prune);
}

TrainedModel fit_mars_forward_only(const features::SupervisedSet& data,
                                   const features::ScalerParams& scaler,
                                   int max_terms) {
  return fit_mars(data, scaler, max_terms, /*prune=*/false);
}

}  // namespace walkcast::models
