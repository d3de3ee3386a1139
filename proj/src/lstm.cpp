#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "walkcast/errors.hpp"
#include "walkcast/lstm_models.hpp"

namespace walkcast::lstm {

namespace {

using num::Act;
using num::Matrix;

// Hot-path kernels over contiguous rows; all LSTM math reduces to these.
void matvec_acc(const Matrix& w, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double* row = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

// y += W^T v, iterated row-wise so the matrix is walked in storage order.
void matvec_t_acc(const Matrix& w, std::span<const double> v, std::span<double> y) {
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double* row = w.row(i);
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::size_t j = 0; j < w.cols(); ++j) y[j] += row[j] * vi;
  }
}

// G += u v^T
void outer_acc(Matrix& g, std::span<const double> u, std::span<const double> v) {
  for (std::size_t i = 0; i < g.rows(); ++i) {
    double* row = g.row(i);
    const double ui = u[i];
    if (ui == 0.0) continue;
    for (std::size_t j = 0; j < g.cols(); ++j) row[j] += ui * v[j];
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Activation derivative expressed through the activated value, which is what
// the step caches hold (the value determines the derivative for all four
// supported kinds; relu' at an activated 0 is 0, consistent with act_grad).
double act_grad_from_value(Act kind, double value) {
  switch (kind) {
    case Act::relu: return value > 0.0 ? 1.0 : 0.0;
    case Act::sigmoid: return value * (1.0 - value);
    case Act::tanh: return 1.0 - value * value;
    case Act::identity: return 1.0;
  }
  return 0.0;
}

Matrix uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  Matrix w(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) w(i, j) = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

// ---- architecture ----------------------------------------------------------

ArchId arch_from_string(std::string_view name) {
  if (name == "lstm1") return ArchId::lstm1;
  if (name == "lstm2") return ArchId::lstm2;
  if (name == "lstm3") return ArchId::lstm3;
  if (name == "lstm4") return ArchId::lstm4;
  throw ConfigError("unknown architecture: " + std::string(name));
}

std::string arch_name(ArchId id) {
  switch (id) {
    case ArchId::lstm1: return "lstm1";
    case ArchId::lstm2: return "lstm2";
    case ArchId::lstm3: return "lstm3";
    case ArchId::lstm4: return "lstm4";
  }
  throw ConfigError("unknown architecture value");
}

LstmArchitecture make_architecture(ArchId id, int lstm_units, int dense_units) {
  if (lstm_units < 1 || dense_units < 1)
    throw ConfigError("make_architecture: layer widths must be >= 1");
  LstmArchitecture arch;
  arch.id = id;
  arch.lstm_units = lstm_units;
  arch.dense_units = dense_units;
  switch (id) {
    case ArchId::lstm1:
      arch.input_steps = 5;
      arch.input_features = 1;
      arch.encoder_decoder = false;
      break;
    case ArchId::lstm2:
      arch.input_steps = 10;
      arch.input_features = 1;
      arch.encoder_decoder = false;
      break;
    case ArchId::lstm3:
      arch.input_steps = 10;
      arch.input_features = 1;
      arch.encoder_decoder = true;
      break;
    case ArchId::lstm4:
      arch.input_steps = 10;
      arch.input_features = 5;
      arch.encoder_decoder = true;
      break;
  }
  return arch;
}

// ---- cell step -------------------------------------------------------------

CellState lstm_cell_step(const Matrix& x_t, const Matrix& h_prev,
                         const Matrix& c_prev, const LstmWeights& w, Act act) {
  const std::size_t units = w.wi.rows();
  const std::size_t input_dim = w.wi.cols();
  if (x_t.rows() != input_dim || x_t.cols() != 1)
    throw ValidationError("lstm_cell_step: x_t must be input_dim x 1");
  if (h_prev.rows() != units || h_prev.cols() != 1 || c_prev.rows() != units ||
      c_prev.cols() != 1)
    throw ValidationError("lstm_cell_step: states must be units x 1");

  auto gate = [&](const Matrix& wg, const Matrix& ug, const Matrix& bg) {
    return num::add(num::add(num::matmul(wg, x_t), num::matmul(ug, h_prev)), bg);
  };
  const Matrix i = num::activation(Act::sigmoid, gate(w.wi, w.ui, w.bi));
  const Matrix f = num::activation(Act::sigmoid, gate(w.wf, w.uf, w.bf));
  const Matrix g = num::activation(act, gate(w.wg, w.ug, w.bg));
  const Matrix o = num::activation(Act::sigmoid, gate(w.wo, w.uo, w.bo));

  CellState next;
  next.c = num::add(num::hadamard(f, c_prev), num::hadamard(i, g));
  next.h = num::hadamard(o, num::activation(act, next.c));
  return next;
}

// ---- dense layer -----------------------------------------------------------

DenseLayer::DenseLayer(int in_dim, int out_dim, Act act_)
    : w(static_cast<std::size_t>(out_dim), static_cast<std::size_t>(in_dim)),
      b(static_cast<std::size_t>(out_dim), 1),
      dw(w.rows(), w.cols()),
      db(b.rows(), 1),
      act(act_) {}

Matrix DenseLayer::forward(const Matrix& input) {
  if (input.cols() != w.cols())
    throw ValidationError("dense layer: expected " + std::to_string(w.cols()) +
                          " input features, got " + std::to_string(input.cols()));
  input_ = input;
  pre_ = Matrix(input.rows(), w.rows());
  for (std::size_t t = 0; t < input.rows(); ++t) {
    auto out_row = std::span<double>{pre_.row(t), pre_.rows() ? w.rows() : 0};
    for (std::size_t i = 0; i < w.rows(); ++i) out_row[i] = b(i, 0);
    matvec_acc(w, input.row_span(t), out_row);
  }
  return num::activation(act, pre_);
}

Matrix DenseLayer::backward(const Matrix& d_output) {
  if (d_output.rows() != pre_.rows() || d_output.cols() != pre_.cols())
    throw ValidationError("dense layer: gradient shape mismatch");
  Matrix d_input(input_.rows(), input_.cols());
  std::vector<double> dpre(w.rows());
  for (std::size_t t = 0; t < input_.rows(); ++t) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      dpre[i] = d_output(t, i) * num::act_grad(act, pre_(t, i));
      db(i, 0) += dpre[i];
    }
    outer_acc(dw, dpre, input_.row_span(t));
    matvec_t_acc(w, dpre, {d_input.row(t), d_input.cols()});
  }
  return d_input;
}

std::vector<Matrix*> DenseLayer::params() { return {&w, &b}; }
std::vector<Matrix*> DenseLayer::grads() { return {&dw, &db}; }

std::unique_ptr<Layer> DenseLayer::clone() const {
  return std::make_unique<DenseLayer>(*this);
}

// ---- lstm layer ------------------------------------------------------------

namespace {

LstmWeights zero_weights(int input_dim, int units) {
  const auto u = static_cast<std::size_t>(units);
  const auto d = static_cast<std::size_t>(input_dim);
  LstmWeights w;
  w.wi = Matrix(u, d); w.ui = Matrix(u, u); w.bi = Matrix(u, 1);
  w.wf = Matrix(u, d); w.uf = Matrix(u, u); w.bf = Matrix(u, 1);
  w.wg = Matrix(u, d); w.ug = Matrix(u, u); w.bg = Matrix(u, 1);
  w.wo = Matrix(u, d); w.uo = Matrix(u, u); w.bo = Matrix(u, 1);
  return w;
}

}  // namespace

LstmLayer::LstmLayer(int input_dim_, int units_, bool return_sequences_, Act act_)
    : w(zero_weights(input_dim_, units_)),
      g(zero_weights(input_dim_, units_)),
      input_dim(input_dim_),
      units(units_),
      return_sequences(return_sequences_),
      act(act_) {}

Matrix LstmLayer::forward(const Matrix& input) {
  if (input.cols() != static_cast<std::size_t>(input_dim))
    throw ValidationError("lstm layer: expected " + std::to_string(input_dim) +
                          " input features, got " + std::to_string(input.cols()));
  if (input.rows() == 0) throw ValidationError("lstm layer: empty sequence");

  const std::size_t T = input.rows();
  const auto u = static_cast<std::size_t>(units);
  steps_.clear();
  steps_.reserve(T);

  std::vector<double> h(u, 0.0);
  std::vector<double> c(u, 0.0);
  Matrix out(return_sequences ? T : 1, u);

  for (std::size_t t = 0; t < T; ++t) {
    StepCache s;
    s.x.assign(input.row(t), input.row(t) + input_dim);
    s.h_prev = h;
    s.c_prev = c;
    s.i.assign(u, 0.0);
    s.f.assign(u, 0.0);
    s.gate_g.assign(u, 0.0);
    s.o.assign(u, 0.0);
    s.c.assign(u, 0.0);

    // Pre-activations built in place, then activated.
    for (std::size_t k = 0; k < u; ++k) {
      s.i[k] = w.bi(k, 0);
      s.f[k] = w.bf(k, 0);
      s.gate_g[k] = w.bg(k, 0);
      s.o[k] = w.bo(k, 0);
    }
    matvec_acc(w.wi, s.x, s.i);
    matvec_acc(w.ui, s.h_prev, s.i);
    matvec_acc(w.wf, s.x, s.f);
    matvec_acc(w.uf, s.h_prev, s.f);
    matvec_acc(w.wg, s.x, s.gate_g);
    matvec_acc(w.ug, s.h_prev, s.gate_g);
    matvec_acc(w.wo, s.x, s.o);
    matvec_acc(w.uo, s.h_prev, s.o);

    for (std::size_t k = 0; k < u; ++k) {
      s.i[k] = sigmoid(s.i[k]);
      s.f[k] = sigmoid(s.f[k]);
      s.gate_g[k] = num::apply_act(act, s.gate_g[k]);
      s.o[k] = sigmoid(s.o[k]);
      s.c[k] = s.f[k] * s.c_prev[k] + s.i[k] * s.gate_g[k];
      h[k] = s.o[k] * num::apply_act(act, s.c[k]);
    }
    c = s.c;
    if (return_sequences)
      std::copy(h.begin(), h.end(), out.row(t));
    else if (t + 1 == T)
      std::copy(h.begin(), h.end(), out.row(0));
    steps_.push_back(std::move(s));
  }
  return out;
}

Matrix LstmLayer::backward(const Matrix& d_output) {
  const std::size_t T = steps_.size();
  const auto u = static_cast<std::size_t>(units);
  const std::size_t expect_rows = return_sequences ? T : 1;
  if (d_output.rows() != expect_rows || d_output.cols() != u)
    throw ValidationError("lstm layer: gradient shape mismatch");

  Matrix d_input(T, static_cast<std::size_t>(input_dim));
  std::vector<double> dh_next(u, 0.0);
  std::vector<double> dc_next(u, 0.0);
  std::vector<double> dpre_i(u), dpre_f(u), dpre_g(u), dpre_o(u), dh_prev(u);

  for (std::size_t t = T; t-- > 0;) {
    const StepCache& s = steps_[t];
    for (std::size_t k = 0; k < u; ++k) {
      double dh = dh_next[k];
      if (return_sequences)
        dh += d_output(t, k);
      else if (t + 1 == T)
        dh += d_output(0, k);

      // h = o * act(c); c = f*c_prev + i*g
      const double act_c = num::apply_act(act, s.c[k]);
      const double dc = dh * s.o[k] * num::act_grad(act, s.c[k]) + dc_next[k];
      dpre_o[k] = dh * act_c * s.o[k] * (1.0 - s.o[k]);
      dpre_f[k] = dc * s.c_prev[k] * s.f[k] * (1.0 - s.f[k]);
      dpre_i[k] = dc * s.gate_g[k] * s.i[k] * (1.0 - s.i[k]);
      dpre_g[k] = dc * s.i[k] * act_grad_from_value(act, s.gate_g[k]);
      dc_next[k] = dc * s.f[k];
    }

    outer_acc(g.wi, dpre_i, s.x);
    outer_acc(g.ui, dpre_i, s.h_prev);
    outer_acc(g.wf, dpre_f, s.x);
    outer_acc(g.uf, dpre_f, s.h_prev);
    outer_acc(g.wg, dpre_g, s.x);
    outer_acc(g.ug, dpre_g, s.h_prev);
    outer_acc(g.wo, dpre_o, s.x);
    outer_acc(g.uo, dpre_o, s.h_prev);
    for (std::size_t k = 0; k < u; ++k) {
      g.bi(k, 0) += dpre_i[k];
      g.bf(k, 0) += dpre_f[k];
      g.bg(k, 0) += dpre_g[k];
      g.bo(k, 0) += dpre_o[k];
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    matvec_t_acc(w.ui, dpre_i, dh_prev);
    matvec_t_acc(w.uf, dpre_f, dh_prev);
    matvec_t_acc(w.ug, dpre_g, dh_prev);
    matvec_t_acc(w.uo, dpre_o, dh_prev);
    dh_next = dh_prev;

    std::span<double> dx{d_input.row(t), static_cast<std::size_t>(input_dim)};
    matvec_t_acc(w.wi, dpre_i, dx);
    matvec_t_acc(w.wf, dpre_f, dx);
    matvec_t_acc(w.wg, dpre_g, dx);
    matvec_t_acc(w.wo, dpre_o, dx);
  }
  return d_input;
}

std::vector<Matrix*> LstmLayer::params() {
  return {&w.wi, &w.ui, &w.bi, &w.wf, &w.uf, &w.bf,
          &w.wg, &w.ug, &w.bg, &w.wo, &w.uo, &w.bo};
}

std::vector<Matrix*> LstmLayer::grads() {
  return {&g.wi, &g.ui, &g.bi, &g.wf, &g.uf, &g.bf,
          &g.wg, &g.ug, &g.bg, &g.wo, &g.uo, &g.bo};
}

std::unique_ptr<Layer> LstmLayer::clone() const {
  return std::make_unique<LstmLayer>(*this);
}

// ---- repeat layer ----------------------------------------------------------

Matrix RepeatLayer::forward(const Matrix& input) {
  if (input.rows() != 1)
    throw ValidationError("repeat layer: expected a single input row");
  Matrix out(static_cast<std::size_t>(n_), input.cols());
  for (std::size_t t = 0; t < out.rows(); ++t)
    std::copy(input.row(0), input.row(0) + input.cols(), out.row(t));
  return out;
}

Matrix RepeatLayer::backward(const Matrix& d_output) {
  if (d_output.rows() != static_cast<std::size_t>(n_))
    throw ValidationError("repeat layer: gradient shape mismatch");
  Matrix d_input(1, d_output.cols());
  for (std::size_t t = 0; t < d_output.rows(); ++t)
    for (std::size_t j = 0; j < d_output.cols(); ++j)
      d_input(0, j) += d_output(t, j);
  return d_input;
}

// ---- network ---------------------------------------------------------------

Network::Network(const Network& other) : arch(other.arch) {
  layers.reserve(other.layers.size());
  for (const auto& layer : other.layers) layers.push_back(layer->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    arch = other.arch;
    layers.clear();
    layers.reserve(other.layers.size());
    for (const auto& layer : other.layers) layers.push_back(layer->clone());
  }
  return *this;
}

Matrix Network::forward(const Matrix& window) {
  if (window.rows() != static_cast<std::size_t>(arch.input_steps) ||
      window.cols() != static_cast<std::size_t>(arch.input_features))
    throw ValidationError(
        "forward: window must be " + std::to_string(arch.input_steps) + " x " +
        std::to_string(arch.input_features) + ", got " +
        std::to_string(window.rows()) + " x " + std::to_string(window.cols()));
  Matrix value = window;
  for (auto& layer : layers) value = layer->forward(value);
  return value;
}

void Network::backward(const Matrix& d_output) {
  Matrix grad = d_output;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it)
    grad = (*it)->backward(grad);
  if (!grad.all_finite())
    throw DivergenceError("backward: non-finite gradient");
}

std::array<double, 5> Network::predict_scaled(const Matrix& window) {
  const Matrix out = forward(window);
  if (out.size() != 5)
    throw ValidationError("predict_scaled: network emitted " +
                          std::to_string(out.size()) + " values, expected 5");
  std::array<double, 5> flat{};
  std::copy(out.data(), out.data() + 5, flat.begin());
  return flat;
}

std::vector<Matrix*> Network::parameters() {
  std::vector<Matrix*> all;
  for (auto& layer : layers)
    for (Matrix* p : layer->params()) all.push_back(p);
  return all;
}

std::vector<Matrix*> Network::gradients() {
  std::vector<Matrix*> all;
  for (auto& layer : layers)
    for (Matrix* g : layer->grads()) all.push_back(g);
  return all;
}

void Network::zero_gradients() {
  for (Matrix* g : gradients()) g->fill(0.0);
}

Network build_network(const LstmArchitecture& arch) {
  Network net;
  net.arch = arch;
  if (!arch.encoder_decoder) {
    net.layers.push_back(std::make_unique<LstmLayer>(
        arch.input_features, arch.lstm_units, /*return_sequences=*/false));
    net.layers.push_back(
        std::make_unique<DenseLayer>(arch.lstm_units, arch.dense_units, Act::relu));
    net.layers.push_back(std::make_unique<DenseLayer>(arch.dense_units, 5,
                                                      Act::identity));
  } else {
    net.layers.push_back(std::make_unique<LstmLayer>(
        arch.input_features, arch.lstm_units, /*return_sequences=*/false));
    net.layers.push_back(std::make_unique<RepeatLayer>(5));
    net.layers.push_back(std::make_unique<LstmLayer>(
        arch.lstm_units, arch.lstm_units, /*return_sequences=*/true));
    net.layers.push_back(
        std::make_unique<DenseLayer>(arch.lstm_units, arch.dense_units, Act::relu));
    net.layers.push_back(std::make_unique<DenseLayer>(arch.dense_units, 1,
                                                      Act::identity));
  }
  return net;
}

void init_weights(Network& net, Rng& rng) {
  for (auto& layer : net.layers) {
    if (auto* dense = dynamic_cast<DenseLayer*>(layer.get())) {
      dense->w = uniform_matrix(dense->w.rows(), dense->w.cols(), rng);
      dense->b.fill(0.0);
    } else if (auto* rec = dynamic_cast<LstmLayer*>(layer.get())) {
      for (Matrix* m : {&rec->w.wi, &rec->w.ui, &rec->w.wf, &rec->w.uf, &rec->w.wg,
                        &rec->w.ug, &rec->w.wo, &rec->w.uo})
        *m = uniform_matrix(m->rows(), m->cols(), rng);
      for (Matrix* m : {&rec->w.bi, &rec->w.bf, &rec->w.bg, &rec->w.bo})
        m->fill(0.0);
    }
  }
}

// ---- training --------------------------------------------------------------

namespace {

double sample_loss_and_grad(Network& net, const Sample& sample, double batch_scale,
                            Matrix& d_out) {
  const Matrix out = net.forward(sample.window);
  if (out.size() != 5)
    throw ValidationError("train: network emitted " + std::to_string(out.size()) +
                          " values, expected 5");
  d_out = Matrix(out.rows(), out.cols());
  double loss = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    const double residual = out.data()[k] - sample.target[k];
    loss += residual * residual;
    d_out.data()[k] = 2.0 * residual / 5.0 * batch_scale;
  }
  net.backward(d_out);
  return loss / 5.0;
}

double validation_loss(Network& net, std::span<const Sample> samples) {
  double total = 0.0;
  for (const Sample& sample : samples) {
    const Matrix out = net.forward(sample.window);
    for (std::size_t k = 0; k < 5; ++k) {
      const double residual = out.data()[k] - sample.target[k];
      total += residual * residual;
    }
  }
  return total / (5.0 * static_cast<double>(samples.size()));
}

}  // namespace

TrainedLstm train(const LstmArchitecture& arch, std::span<const Sample> data,
                  const TrainingConfig& config) {
  if (data.empty()) throw ValidationError("train: no samples");
  if (config.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (config.batch < 1) throw ConfigError("train: batch must be >= 1");
  if (!(config.lr > 0.0)) throw ConfigError("train: lr must be > 0");
  if (config.validation_fraction < 0.0 || config.validation_fraction >= 1.0)
    throw ConfigError("train: validation_fraction must be in [0, 1)");

  const std::size_t n = data.size();
  std::size_t n_val = 0;
  if (config.validation_fraction > 0.0) {
    n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(config.validation_fraction * static_cast<double>(n))));
    if (n_val >= n)
      throw ConfigError("train: validation fraction leaves no training samples");
  }
  const std::size_t n_train = n - n_val;
  const std::span<const Sample> val = data.subspan(n_train);

  Rng rng(config.seed);
  TrainedLstm result;
  result.arch = arch;
  result.net = build_network(arch);
  init_weights(result.net, rng);
  Network& net = result.net;

  const auto params = net.parameters();
  const auto grads = net.gradients();
  std::vector<num::AdamState> opt;
  opt.reserve(params.size());
  for (const Matrix* p : params) opt.emplace_back(p->rows(), p->cols(), config.lr);

  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  const auto batch_size = static_cast<std::size_t>(config.batch);

  Matrix d_out;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < n_train; start += batch_size, ++batch_index) {
      const std::size_t stop = std::min(n_train, start + batch_size);
      // Each sample's output gradient carries 1/B so accumulated gradients
      // equal the gradient of the batch-mean loss.
      const double batch_scale = 1.0 / static_cast<double>(stop - start);
      net.zero_gradients();
      double batch_loss = 0.0;
      try {
        for (std::size_t i = start; i < stop; ++i)
          batch_loss +=
              sample_loss_and_grad(net, data[order[i]], batch_scale, d_out);
      } catch (const DivergenceError& e) {
        // Re-throw overflow detected inside backward with loop context.
        throw DivergenceError(std::string(e.what()) + " at epoch " +
                                  std::to_string(epoch) + ", batch " +
                                  std::to_string(batch_index),
                              epoch, batch_index);
      }
      batch_loss *= batch_scale;
      if (!std::isfinite(batch_loss))
        throw DivergenceError("train: non-finite loss at epoch " +
                                  std::to_string(epoch) + ", batch " +
                                  std::to_string(batch_index),
                              epoch, batch_index);
      for (std::size_t k = 0; k < params.size(); ++k)
        num::adam_step(*params[k], *grads[k], opt[k]);
      epoch_loss += batch_loss * static_cast<double>(stop - start);
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(n_train));
    if (n_val > 0) result.val_loss.push_back(validation_loss(net, val));
  }
  return result;
}

// ---- windows ---------------------------------------------------------------

void fill_window_row(std::span<double> out, const features::FeatureRow& row,
                     int input_features) {
  out[0] = row.open_scaled;
  if (input_features == 5) {
    out[1] = row.high_norm;
    out[2] = row.low_norm;
    out[3] = row.close_norm;
    out[4] = row.volume_norm;
  } else if (input_features != 1) {
    throw ValidationError("fill_window_row: input_features must be 1 or 5");
  }
}

std::vector<Sample> make_windows(std::span<const features::FeatureRow> history,
                                 const LstmArchitecture& arch) {
  const std::size_t steps = static_cast<std::size_t>(arch.input_steps);
  if (history.size() < steps + 5)
    throw ValidationError("make_windows: insufficient history: need at least " +
                          std::to_string(steps + 5) + " rows, got " +
                          std::to_string(history.size()));
  if (history.size() % 5 != 0)
    throw ValidationError("make_windows: history must be whole five-day weeks");

  const std::size_t weeks = history.size() / 5;
  std::vector<Sample> samples;
  for (std::size_t week = 0; week < weeks; ++week) {
    const std::size_t target_start = week * 5;
    if (target_start < steps) continue;  // not enough lookback before this week
    Sample s;
    s.window = Matrix(steps, static_cast<std::size_t>(arch.input_features));
    for (std::size_t t = 0; t < steps; ++t)
      fill_window_row({s.window.row(t), s.window.cols()},
                      history[target_start - steps + t], arch.input_features);
    for (std::size_t k = 0; k < 5; ++k)
      s.target[k] = history[target_start + k].open_scaled;
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace walkcast::lstm
