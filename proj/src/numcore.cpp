#include "walkcast/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "walkcast/errors.hpp"

namespace walkcast::num {

Matrix Matrix::row_vector(std::span<const double> values) {
  Matrix m(1, values.size());
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

Matrix Matrix::column_vector(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c)
      throw ValidationError("Matrix::from_rows: ragged initializer");
    std::copy(row.begin(), row.end(), m.row(i++));
  }
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ValidationError("matmul: shape mismatch " + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()) + " * " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  Matrix c(a.rows(), b.cols());
  // i-k-j order keeps the per-element accumulation in ascending k, identical
  // to the naive left-to-right dot product, while staying cache friendly.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

namespace {
Matrix elementwise(const Matrix& a, const Matrix& b, const char* op,
                   double (*f)(double, double)) {
  if (!a.same_shape(b))
    throw ValidationError(std::string(op) + ": shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = f(a.data()[i], b.data()[i]);
  return c;
}
}  // namespace

Matrix add(const Matrix& a, const Matrix& b) {
  return elementwise(a, b, "add", [](double x, double y) { return x + y; });
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  return elementwise(a, b, "subtract", [](double x, double y) { return x - y; });
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  return elementwise(a, b, "hadamard", [](double x, double y) { return x * y; });
}

Matrix scale(const Matrix& a, double factor) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * factor;
  return c;
}

double apply_act(Act kind, double x) {
  switch (kind) {
    case Act::relu: return x > 0.0 ? x : 0.0;
    case Act::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Act::tanh: return std::tanh(x);
    case Act::identity: return x;
  }
  return x;
}

double act_grad(Act kind, double pre) {
  switch (kind) {
    case Act::relu: return pre > 0.0 ? 1.0 : 0.0;
    case Act::sigmoid: {
      double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 - s);
    }
    case Act::tanh: {
      double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Act::identity: return 1.0;
  }
  return 1.0;
}

Matrix activation(Act kind, const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] = apply_act(kind, x.data()[i]);
  return y;
}

double mse_loss(const Matrix& pred, const Matrix& target) {
  if (!pred.same_shape(target))
    throw ValidationError("mse_loss: shape mismatch");
  if (pred.size() == 0) throw ValidationError("mse_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double d = pred.data()[i] - target.data()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

void adam_step(Matrix& params, const Matrix& grads, AdamState& state) {
  if (!params.same_shape(grads) || !params.same_shape(state.m))
    throw ValidationError("adam_step: shape mismatch");
  state.t += 1;
  double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grads.data()[i];
    double m = state.m.data()[i] = state.beta1 * state.m.data()[i] + (1.0 - state.beta1) * g;
    double v = state.v.data()[i] = state.beta2 * state.v.data()[i] + (1.0 - state.beta2) * g * g;
    double mhat = m / b1t;
    double vhat = v / b2t;
    params.data()[i] -= state.lr * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

Matrix finite_diff_gradient(const std::function<double(const Matrix&)>& loss_fn,
                            const Matrix& params, double h) {
  Matrix grad(params.rows(), params.cols());
  Matrix p = params;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double saved = p.data()[i];
    p.data()[i] = saved + h;
    double up = loss_fn(p);
    p.data()[i] = saved - h;
    double down = loss_fn(p);
    p.data()[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw DivergenceError("finite_diff_gradient: non-finite loss");
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<double> householder_lstsq(const Matrix& a, std::span<const double> b,
                                      double rank_tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw ValidationError("householder_lstsq: size mismatch");
  if (m < n) throw ValidationError("householder_lstsq: underdetermined system");

  Matrix r = a;
  std::vector<double> y(b.begin(), b.end());

  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += r(i, k) * r(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;  // caught by the rank check below
    double alpha = r(k, k) > 0 ? -norm : norm;
    // v = x - alpha e_k, applied implicitly.
    std::vector<double> v(m - k);
    v[0] = r(k, k) - alpha;
    for (std::size_t i = k + 1; i < m; ++i) v[i - k] = r(i, k);
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * r(i, j);
      double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) r(i, j) -= f * v[i - k];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < m; ++i) dot += v[i - k] * y[i];
    double f = 2.0 * dot / vnorm2;
    for (std::size_t i = k; i < m; ++i) y[i] -= f * v[i - k];
  }

  double max_pivot = 0.0;
  for (std::size_t k = 0; k < n; ++k) max_pivot = std::max(max_pivot, std::abs(r(k, k)));
  if (max_pivot == 0.0)
    throw ValidationError("householder_lstsq: zero design matrix");

  std::vector<double> x(n, 0.0);
  for (std::size_t kk = n; kk-- > 0;) {
    if (std::abs(r(kk, kk)) < rank_tol * max_pivot)
      throw ValidationError("householder_lstsq: rank-deficient design (pivot " +
                            std::to_string(kk) + ")");
    double s = y[kk];
    for (std::size_t j = kk + 1; j < n; ++j) s -= r(kk, j) * x[j];
    x[kk] = s / r(kk, kk);
  }
  return x;
}

std::vector<double> lstsq_drop_collinear(const Matrix& a, std::span<const double> b,
                                         double rank_tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw ValidationError("lstsq_drop_collinear: size mismatch");

  // Modified Gram-Schmidt screening; only the kept-column set matters here,
  // the actual solve below re-factorizes the kept submatrix.
  std::vector<std::vector<double>> q;
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> col(m);
    for (std::size_t i = 0; i < m; ++i) col[i] = a(i, j);
    double raw = 0.0;
    for (double v : col) raw += v * v;
    for (const auto& qc : q) {
      double proj = 0.0;
      for (std::size_t i = 0; i < m; ++i) proj += qc[i] * col[i];
      for (std::size_t i = 0; i < m; ++i) col[i] -= proj * qc[i];
    }
    double left = 0.0;
    for (double v : col) left += v * v;
    if (left <= rank_tol * rank_tol * raw || left == 0.0) continue;
    double inv = 1.0 / std::sqrt(left);
    for (double& v : col) v *= inv;
    q.push_back(std::move(col));
    kept.push_back(j);
  }
  if (kept.empty()) throw ValidationError("lstsq_drop_collinear: zero design matrix");

  Matrix sub(m, kept.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < kept.size(); ++j) sub(i, j) = a(i, kept[j]);
  }
  std::vector<double> partial = householder_lstsq(sub, b, 1e-13);
  std::vector<double> x(n, 0.0);
  for (std::size_t j = 0; j < kept.size(); ++j) x[kept[j]] = partial[j];
  return x;
}

}  // namespace walkcast::num
