#ifndef WALKCAST_BACKTEST_HPP
#define WALKCAST_BACKTEST_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "walkcast/classic_models.hpp"
#include "walkcast/dataio.hpp"
#include "walkcast/lstm_models.hpp"

namespace walkcast::backtest {

// Block-position labels; positional, not calendar weekdays.
inline constexpr std::array<std::string_view, 5> kPositionLabels = {
    "Mon", "Tue", "Wed", "Thu", "Fri"};

// One forecast week: five predictions made before the five actuals were
// revealed to the forecaster.
struct ForecastRound {
  std::size_t week_index = 0;
  std::array<double, 5> predicted{};
  std::array<double, 5> actual{};
};

// Outcome of a single evaluation run (one seed). The flat predicted/actual
// series is present in every mode, in time order; rounds group it by week
// whenever the evaluated partition is whole five-day weeks.
struct RunResult {
  std::vector<ForecastRound> rounds;
  std::vector<double> predicted;
  std::vector<double> actual;
  std::vector<int> positions;  // block position (0..4) of each flat entry
  double rmse_overall = 0.0;
  std::array<double, 5> rmse_per_day{};
  bool has_day_rmse = false;
  std::optional<double> correlation;  // classical daily mode only
  double wall_time_sec = 0.0;
  std::uint64_t seed = 0;
  // Fingerprint of the weights used for each forecast week (weekly mode);
  // constant across weeks unless retraining is enabled.
  std::vector<std::uint64_t> weight_fingerprints;
};

// Case I (every train day) and Case II (every test day) evaluations of one
// classical model, fit once on the train partition.
struct ClassicEval {
  RunResult train_result;
  RunResult test_result;
};

ClassicEval evaluate_classic(const models::ModelSpec& spec,
                             const dataio::DatasetSplit& split, int lag);

// Multi-step walk-forward validation: train on the initial train partition,
// then for each test week predict its five opens from the trailing
// input_steps days of history and append the week's actuals to history.
// With retrain_each_week the model is refit after every appended week.
RunResult walk_forward(const lstm::LstmArchitecture& arch,
                       const dataio::DatasetSplit& split,
                       const lstm::TrainingConfig& config,
                       bool retrain_each_week = false);

// Per-column aggregate over repetition rounds (population SD, n divisor).
struct ColumnStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double sd = 0.0;
};

ColumnStats column_stats(std::span<const double> values);

struct RoundsSummary {
  ColumnStats rmse;
  std::array<ColumnStats, 5> day_rmse{};
  ColumnStats time_sec;
  double ratio_rmse_mean = 0.0;  // mean overall RMSE / mean actual test open
  double test_mean_open = 0.0;
};

// Runs the task n_rounds times with seeds base_seed + 0..n-1. threads <= 1
// runs sequentially; more workers must produce the identical sequence.
std::vector<RunResult> run_rounds(const std::function<RunResult(std::uint64_t)>& task,
                                  int n_rounds, std::uint64_t base_seed,
                                  int threads = 1);

RoundsSummary summarize_rounds(std::span<const RunResult> results,
                               double test_mean_open);

double mean_open(std::span<const dataio::OhlcvRecord> records);

// ---- grid search -----------------------------------------------------------

// Ordered axes; the sweep enumerates the Cartesian product with the last
// axis varying fastest, so trace order is reproducible.
struct ParamGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;
};

struct GridPoint {
  std::map<std::string, double> values;
  double score = 0.0;  // validation RMSE, raw index points
};

struct GridResult {
  GridPoint best;
  std::vector<GridPoint> trace;  // every evaluated point, sweep order
};

// Holds out the last max(1, round(fraction * train_weeks)) train weeks as
// validation, trains each candidate on the remaining weeks, and scores it on
// the held-out weeks. Ties keep the earliest point in sweep order.
GridResult grid_search(const models::ModelSpec& base, const ParamGrid& grid,
                       const dataio::DatasetSplit& split, int lag,
                       double validation_fraction = 0.2);

GridResult grid_search(lstm::ArchId id, const lstm::TrainingConfig& base,
                       const ParamGrid& grid, const dataio::DatasetSplit& split,
                       double validation_fraction = 0.2);

// FNV-1a over the bit patterns of all parameter tensors, in parameter order.
std::uint64_t weights_fingerprint(std::span<num::Matrix* const> params);

}  // namespace walkcast::backtest

#endif  // WALKCAST_BACKTEST_HPP
