#ifndef WALKCAST_NUMCORE_HPP
#define WALKCAST_NUMCORE_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace walkcast::num {

// Dense row-major matrix of doubles. Operations return new values; nothing
// here keeps shared mutable state.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix row_vector(std::span<const double> values);
  static Matrix column_vector(std::span<const double> values);
  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<const double> row_span(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& values() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Standard product with left-to-right summation per dot product.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);

enum class Act { relu, sigmoid, tanh, identity };

double apply_act(Act kind, double x);
// Derivative with respect to the pre-activation. relu'(0) is defined as 0.
double act_grad(Act kind, double pre);
Matrix activation(Act kind, const Matrix& x);

double mse_loss(const Matrix& pred, const Matrix& target);

// ADAM accumulator for one parameter tensor.
struct AdamState {
  Matrix m;
  Matrix v;
  long t = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols, double lr_ = 0.001)
      : m(rows, cols), v(rows, cols), lr(lr_) {}
};

// Bias-corrected ADAM update, applied in place.
void adam_step(Matrix& params, const Matrix& grads, AdamState& state);

// Central-difference gradient of a scalar loss; the test oracle for all
// hand-derived backpropagation in this project.
Matrix finite_diff_gradient(const std::function<double(const Matrix&)>& loss_fn,
                            const Matrix& params, double h = 1e-5);

// Least squares min ||A x - b|| via Householder QR. Throws ValidationError
// on rank deficiency (|R_kk| below tol relative to the largest pivot).
std::vector<double> householder_lstsq(const Matrix& a, std::span<const double> b,
                                      double rank_tol = 1e-10);

// Least squares that tolerates exact column dependencies: columns are
// screened left to right and any column whose component outside the span of
// the earlier kept columns falls below rank_tol times its own norm gets
// coefficient 0. The fitted values equal those of any least-squares solution;
// keeping the earliest columns makes the coefficients deterministic.
std::vector<double> lstsq_drop_collinear(const Matrix& a, std::span<const double> b,
                                         double rank_tol = 1e-10);

}  // namespace walkcast::num

#endif  // WALKCAST_NUMCORE_HPP
