#ifndef WALKCAST_LSTM_MODELS_HPP
#define WALKCAST_LSTM_MODELS_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "walkcast/features.hpp"
#include "walkcast/numcore.hpp"
#include "walkcast/rng.hpp"

namespace walkcast::lstm {

enum class ArchId { lstm1, lstm2, lstm3, lstm4 };

ArchId arch_from_string(std::string_view name);  // "lstm1".."lstm4"
std::string arch_name(ArchId id);

// The four architectures differ only in lookback, per-day features, and
// whether the stack is a plain encoder or an encoder-decoder:
//   lstm1  (5 days,  open only)  lstm -> dense(relu) -> dense(5)
//   lstm2  (10 days, open only)  same stack as lstm1
//   lstm3  (10 days, open only)  lstm -> repeat(5) -> lstm -> per-day dense head
//   lstm4  (10 days, 5 vars)     as lstm3
struct LstmArchitecture {
  ArchId id = ArchId::lstm1;
  int input_steps = 5;
  int input_features = 1;
  int lstm_units = 200;
  int dense_units = 100;
  bool encoder_decoder = false;
};

// Paper-width stack for the given id; units are overridable so gradient
// checks can run at tractable sizes.
LstmArchitecture make_architecture(ArchId id, int lstm_units = 200,
                                   int dense_units = 100);

struct TrainingConfig {
  int epochs = 70;
  int batch = 16;
  double lr = 0.001;
  std::uint64_t seed = 0;
  double validation_fraction = 0.0;  // last fraction of samples held out
};

// One supervised pair: the window read from history and the following week's
// five scaled open values.
struct Sample {
  num::Matrix window;  // input_steps x input_features
  std::array<double, 5> target{};
};

// ---- layers ----------------------------------------------------------------

// Input-to-gate, recurrent, and bias tensors for the four gates.
struct LstmWeights {
  num::Matrix wi, ui, bi;  // input gate
  num::Matrix wf, uf, bf;  // forget gate
  num::Matrix wg, ug, bg;  // cell candidate
  num::Matrix wo, uo, bo;  // output gate
};

// One recurrence step: gates sigmoid, candidate and hidden output through
// act. x_t is input_dim x 1; states are units x 1.
struct CellState {
  num::Matrix h;
  num::Matrix c;
};
CellState lstm_cell_step(const num::Matrix& x_t, const num::Matrix& h_prev,
                         const num::Matrix& c_prev, const LstmWeights& w,
                         num::Act act = num::Act::relu);

// Data between layers is a (timesteps x features) matrix; a flat vector is
// the 1-row case. Each layer caches its forward activations so backward can
// run immediately afterwards on the same input.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual num::Matrix forward(const num::Matrix& input) = 0;
  // d_output is dLoss/d(this layer's output); returns dLoss/d(input) and
  // accumulates parameter gradients.
  virtual num::Matrix backward(const num::Matrix& d_output) = 0;
  virtual std::vector<num::Matrix*> params() = 0;
  virtual std::vector<num::Matrix*> grads() = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;
  virtual std::string kind() const = 0;
};

// Fully connected layer applied independently to every input row, which
// makes it both the plain dense head (1 row) and the per-day distributed
// head (5 rows).
class DenseLayer final : public Layer {
 public:
  DenseLayer(int in_dim, int out_dim, num::Act act);

  num::Matrix forward(const num::Matrix& input) override;
  num::Matrix backward(const num::Matrix& d_output) override;
  std::vector<num::Matrix*> params() override;
  std::vector<num::Matrix*> grads() override;
  std::unique_ptr<Layer> clone() const override;
  std::string kind() const override { return "dense"; }

  num::Matrix w;  // out_dim x in_dim
  num::Matrix b;  // out_dim x 1
  num::Matrix dw, db;
  num::Act act;

 private:
  num::Matrix input_;
  num::Matrix pre_;
};

// Standard LSTM over the input sequence. With return_sequences the output is
// the full hidden-state sequence (T x units); otherwise the final hidden
// state (1 x units). Initial states are zero.
class LstmLayer final : public Layer {
 public:
  LstmLayer(int input_dim, int units, bool return_sequences,
            num::Act act = num::Act::relu);

  num::Matrix forward(const num::Matrix& input) override;
  num::Matrix backward(const num::Matrix& d_output) override;
  std::vector<num::Matrix*> params() override;
  std::vector<num::Matrix*> grads() override;
  std::unique_ptr<Layer> clone() const override;
  std::string kind() const override { return "lstm"; }

  LstmWeights w;
  LstmWeights g;  // gradient accumulators, same shapes as w
  int input_dim;
  int units;
  bool return_sequences;
  num::Act act;

 private:
  struct StepCache {
    std::vector<double> x, h_prev, c_prev;
    std::vector<double> i, f, gate_g, o, c;
  };
  std::vector<StepCache> steps_;
};

// Tiles its single input row n times; backward sums the row gradients.
class RepeatLayer final : public Layer {
 public:
  explicit RepeatLayer(int n) : n_(n) {}

  num::Matrix forward(const num::Matrix& input) override;
  num::Matrix backward(const num::Matrix& d_output) override;
  std::vector<num::Matrix*> params() override { return {}; }
  std::vector<num::Matrix*> grads() override { return {}; }
  std::unique_ptr<Layer> clone() const override {
    return std::make_unique<RepeatLayer>(n_);
  }
  std::string kind() const override { return "repeat"; }

 private:
  int n_;
};

// ---- network ---------------------------------------------------------------

class Network {
 public:
  Network() = default;
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  num::Matrix forward(const num::Matrix& window);
  void backward(const num::Matrix& d_output);

  // Runs forward and flattens to the five scaled opens (shape contract:
  // every architecture emits exactly five values).
  std::array<double, 5> predict_scaled(const num::Matrix& window);

  std::vector<num::Matrix*> parameters();
  std::vector<num::Matrix*> gradients();
  void zero_gradients();

  LstmArchitecture arch;
  std::vector<std::unique_ptr<Layer>> layers;
};

// Zero-initialized stack for the architecture.
Network build_network(const LstmArchitecture& arch);
// Seeded uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] weights; biases zero.
void init_weights(Network& net, Rng& rng);

// ---- training --------------------------------------------------------------

struct TrainedLstm {
  LstmArchitecture arch;
  Network net;
  features::ScalerParams scaler;  // filled in by the evaluation layer
  std::vector<double> train_loss;  // one entry per epoch
  std::vector<double> val_loss;    // empty unless validation_fraction > 0
};

// Mini-batch ADAM over per-epoch seeded shuffles; the trailing n mod batch
// samples form a final smaller batch. Throws DivergenceError naming epoch
// and batch when the loss goes non-finite.
TrainedLstm train(const LstmArchitecture& arch, std::span<const Sample> data,
                  const TrainingConfig& config);

// Week-aligned supervised pairs: sample j's target is week j's five scaled
// opens and its window is the input_steps days immediately before that week.
// History length must be a positive multiple of five (whole week blocks).
std::vector<Sample> make_windows(std::span<const features::FeatureRow> history,
                                 const LstmArchitecture& arch);

// The per-day input vector make_windows writes: [open] for univariate
// architectures, [open, high, low, close, volume] (scaled) for lstm4.
void fill_window_row(std::span<double> out, const features::FeatureRow& row,
                     int input_features);

}  // namespace walkcast::lstm

#endif  // WALKCAST_LSTM_MODELS_HPP
