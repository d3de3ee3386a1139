#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "walkcast/errors.hpp"
#include "walkcast/numcore.hpp"
#include "walkcast/rng.hpp"

using walkcast::Rng;
using walkcast::ValidationError;
namespace num = walkcast::num;

namespace {

num::Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                          double lo = -1.0, double hi = 1.0) {
  num::Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

// Independent reference product: plain triple loop, accumulating left to
// right exactly like the implementation claims to.
num::Matrix naive_matmul(const num::Matrix& a, const num::Matrix& b) {
  num::Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

double max_abs_diff(const num::Matrix& a, const num::Matrix& b) {
  REQUIRE(a.same_shape(b));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("matmul: identity and annihilator") {
  Rng rng(1);
  num::Matrix a = random_matrix(rng, 3, 3);
  CHECK(num::matmul(num::Matrix::identity(3), a) == a);
  num::Matrix zero(3, 4, 0.0);
  num::Matrix prod = num::matmul(a, zero);
  CHECK(prod == num::Matrix(3, 4, 0.0));
}

TEST_CASE("matmul: random 4x3 by 3x2 matches the naive triple loop") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    num::Matrix a = random_matrix(rng, 4, 3);
    num::Matrix b = random_matrix(rng, 3, 2);
    CHECK(max_abs_diff(num::matmul(a, b), naive_matmul(a, b)) < 1e-12);
  }
}

TEST_CASE("matmul: shape mismatch is rejected") {
  num::Matrix a(2, 3), b(2, 2);
  CHECK_THROWS_AS((void)num::matmul(a, b), ValidationError);
}

TEST_CASE("matmul: associative on random triples to 1e-9 relative") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    num::Matrix a = random_matrix(rng, 4, 5);
    num::Matrix b = random_matrix(rng, 5, 3);
    num::Matrix c = random_matrix(rng, 3, 6);
    num::Matrix left = num::matmul(num::matmul(a, b), c);
    num::Matrix right = num::matmul(a, num::matmul(b, c));
    for (std::size_t i = 0; i < left.rows(); ++i) {
      for (std::size_t j = 0; j < left.cols(); ++j) {
        double scale = std::max({1.0, std::abs(left(i, j)), std::abs(right(i, j))});
        CHECK(std::abs(left(i, j) - right(i, j)) / scale < 1e-9);
      }
    }
  }
}

TEST_CASE("matmul: deterministic, identical inputs give bit-identical output") {
  Rng rng(3);
  num::Matrix a = random_matrix(rng, 6, 6);
  num::Matrix b = random_matrix(rng, 6, 6);
  CHECK(num::matmul(a, b) == num::matmul(a, b));
}

TEST_CASE("elementwise ops: add, subtract, hadamard, scale, transpose") {
  num::Matrix a = num::Matrix::from_rows({{1, 2}, {3, 4}});
  num::Matrix b = num::Matrix::from_rows({{5, 6}, {7, 8}});
  CHECK(num::add(a, b) == num::Matrix::from_rows({{6, 8}, {10, 12}}));
  CHECK(num::subtract(b, a) == num::Matrix::from_rows({{4, 4}, {4, 4}}));
  CHECK(num::hadamard(a, b) == num::Matrix::from_rows({{5, 12}, {21, 32}}));
  CHECK(num::scale(a, 2.0) == num::Matrix::from_rows({{2, 4}, {6, 8}}));
  CHECK(num::transpose(a) == num::Matrix::from_rows({{1, 3}, {2, 4}}));
  CHECK(num::transpose(num::transpose(a)) == a);
}

TEST_CASE("activation: relu, sigmoid, tanh, identity definitions") {
  CHECK(num::apply_act(num::Act::relu, -1.0) == 0.0);
  CHECK(num::apply_act(num::Act::relu, 2.0) == 2.0);
  CHECK(num::apply_act(num::Act::relu, 0.0) == 0.0);
  CHECK(num::apply_act(num::Act::sigmoid, 0.0) == doctest::Approx(0.5));
  CHECK(num::apply_act(num::Act::tanh, 0.0) == doctest::Approx(0.0));
  CHECK(num::apply_act(num::Act::identity, -3.5) == -3.5);

  num::Matrix x = num::Matrix::from_rows({{-1.0, 0.0, 2.0}});
  num::Matrix r = num::activation(num::Act::relu, x);
  CHECK(r == num::Matrix::from_rows({{0.0, 0.0, 2.0}}));
}

TEST_CASE("activation gradient: relu'(0) is 0 by convention") {
  CHECK(num::act_grad(num::Act::relu, 0.0) == 0.0);
  CHECK(num::act_grad(num::Act::relu, -0.5) == 0.0);
  CHECK(num::act_grad(num::Act::relu, 0.5) == 1.0);
  // sigmoid'(x) = s(1-s); at 0 that is 0.25
  CHECK(num::act_grad(num::Act::sigmoid, 0.0) == doctest::Approx(0.25));
  CHECK(num::act_grad(num::Act::tanh, 0.0) == doctest::Approx(1.0));
  CHECK(num::act_grad(num::Act::identity, 9.0) == 1.0);
}

TEST_CASE("mse_loss: definition and loop oracle") {
  num::Matrix p = num::Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(num::mse_loss(p, p) == 0.0);

  num::Matrix q = num::Matrix::from_rows({{3, 4}, {5, 6}});  // residual 2 everywhere
  CHECK(num::mse_loss(q, p) == doctest::Approx(4.0));

  Rng rng(5);
  num::Matrix a = random_matrix(rng, 5, 7);
  num::Matrix b = random_matrix(rng, 5, 7);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double d = a(i, j) - b(i, j);
      acc += d * d;
    }
  }
  CHECK(num::mse_loss(a, b) == doctest::Approx(acc / 35.0).epsilon(1e-12));

  num::Matrix wrong(5, 6);
  CHECK_THROWS_AS((void)num::mse_loss(a, wrong), ValidationError);
}

TEST_CASE("adam_step: zero gradient with fresh state leaves params unchanged") {
  num::Matrix params = num::Matrix::from_rows({{1.0, -2.0}});
  num::Matrix grads(1, 2, 0.0);
  num::AdamState state(1, 2);
  adam_step(params, grads, state);
  CHECK(params == num::Matrix::from_rows({{1.0, -2.0}}));
  CHECK(state.t == 1);
}

TEST_CASE("adam_step: first step with unit gradient moves by about lr") {
  num::Matrix params(1, 1, 0.0);
  num::Matrix grads(1, 1, 1.0);
  num::AdamState state(1, 1);
  adam_step(params, grads, state);
  // After bias correction m_hat = 1, v_hat = 1, so the update is
  // lr * 1 / (sqrt(1) + eps) = 0.001 / (1 + 1e-8).
  CHECK(params(0, 0) == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam_step: two steps with constant gradient match the recurrence") {
  num::Matrix params(1, 1, 0.5);
  num::Matrix grads(1, 1, 0.25);
  num::AdamState state(1, 1);
  adam_step(params, grads, state);
  adam_step(params, grads, state);

  // Direct evaluation of the published recurrence, independently of the
  // implementation.
  double lr = 0.001, b1 = 0.9, b2 = 0.999, eps = 1e-8, g = 0.25;
  double p = 0.5, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    double m_hat = m / (1 - std::pow(b1, t));
    double v_hat = v / (1 - std::pow(b2, t));
    p -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
  CHECK(params(0, 0) == doctest::Approx(p).epsilon(1e-12));
  CHECK(state.t == 2);
}

TEST_CASE("adam_step: update magnitude stays within 10x lr on random inputs") {
  Rng rng(13);
  num::Matrix params = random_matrix(rng, 4, 4);
  num::AdamState state(4, 4, 0.01);
  for (int step = 0; step < 50; ++step) {
    num::Matrix before = params;
    num::Matrix grads = random_matrix(rng, 4, 4, -5.0, 5.0);
    adam_step(params, grads, state);
    CHECK(max_abs_diff(params, before) <= 10.0 * 0.01);
  }
}

TEST_CASE("finite_diff_gradient: quadratic has analytic gradient 2p") {
  num::Matrix p = num::Matrix::from_rows({{1.0, 2.0}});
  auto loss = [](const num::Matrix& m) {
    double acc = 0.0;
    for (double v : m.values()) acc += v * v;
    return acc;
  };
  num::Matrix g = num::finite_diff_gradient(loss, p);
  CHECK(std::abs(g(0, 0) - 2.0) < 1e-8);
  CHECK(std::abs(g(0, 1) - 4.0) < 1e-8);
}

TEST_CASE("finite_diff_gradient: constant function has zero gradient") {
  num::Matrix p = num::Matrix::from_rows({{3.0, -1.0, 0.5}});
  num::Matrix g = num::finite_diff_gradient([](const num::Matrix&) { return 7.0; }, p);
  CHECK(g == num::Matrix(1, 3, 0.0));
}

TEST_CASE("finite_diff_gradient: sum of relu away from the kink") {
  num::Matrix p = num::Matrix::from_rows({{-1.0, 3.0}});
  auto loss = [](const num::Matrix& m) {
    double acc = 0.0;
    for (double v : m.values()) acc += std::max(0.0, v);
    return acc;
  };
  num::Matrix g = num::finite_diff_gradient(loss, p);
  CHECK(std::abs(g(0, 0) - 0.0) < 1e-8);
  CHECK(std::abs(g(0, 1) - 1.0) < 1e-8);
}

TEST_CASE("householder_lstsq: recovers the exact solution of a square system") {
  num::Matrix a = num::Matrix::from_rows({{2, 1}, {1, 3}});
  std::vector<double> x_true = {1.5, -2.0};
  std::vector<double> b = {2 * 1.5 + 1 * -2.0, 1 * 1.5 + 3 * -2.0};
  auto x = num::householder_lstsq(a, b);
  CHECK(x[0] == doctest::Approx(x_true[0]).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(x_true[1]).epsilon(1e-12));
}

TEST_CASE("householder_lstsq: rejects rank deficiency and bad shapes") {
  num::Matrix dup = num::Matrix::from_rows({{1, 1}, {2, 2}, {3, 3}});
  std::vector<double> b = {1, 2, 3};
  CHECK_THROWS_AS((void)num::householder_lstsq(dup, b), ValidationError);

  num::Matrix wide(2, 3);
  std::vector<double> b2 = {1, 2};
  CHECK_THROWS_AS((void)num::householder_lstsq(wide, b2), ValidationError);
}

TEST_CASE("lstsq_drop_collinear: duplicate column gets coefficient zero") {
  // Third column duplicates the first; the fit must keep the earlier one.
  Rng rng(17);
  num::Matrix a(20, 3);
  std::vector<double> b(20);
  for (std::size_t i = 0; i < 20; ++i) {
    double u = rng.uniform(-2.0, 2.0);
    double v = rng.uniform(-2.0, 2.0);
    a(i, 0) = u;
    a(i, 1) = v;
    a(i, 2) = u;
    b[i] = 3.0 * u - 0.5 * v;
  }
  auto x = num::lstsq_drop_collinear(a, b);
  CHECK(x[2] == 0.0);
  CHECK(x[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(x[1] == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("lstsq_drop_collinear: full-rank problems match householder_lstsq") {
  Rng rng(19);
  num::Matrix a = random_matrix(rng, 30, 4);
  std::vector<double> b(30);
  for (auto& v : b) v = rng.uniform(-1.0, 1.0);
  auto strict = num::householder_lstsq(a, b);
  auto tolerant = num::lstsq_drop_collinear(a, b);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(tolerant[j] == doctest::Approx(strict[j]).epsilon(1e-10));
  }
}

TEST_CASE("matrix: constructors and finiteness check") {
  auto rv = num::Matrix::row_vector(std::vector<double>{1, 2, 3});
  CHECK(rv.rows() == 1);
  CHECK(rv.cols() == 3);
  auto cv = num::Matrix::column_vector(std::vector<double>{1, 2});
  CHECK(cv.rows() == 2);
  CHECK(cv.cols() == 1);
  CHECK(num::Matrix::identity(2) == num::Matrix::from_rows({{1, 0}, {0, 1}}));

  num::Matrix bad(1, 1, std::numeric_limits<double>::quiet_NaN());
  CHECK_FALSE(bad.all_finite());
  CHECK(rv.all_finite());
}
