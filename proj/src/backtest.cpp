#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

#include "walkcast/backtest.hpp"
#include "walkcast/errors.hpp"
#include "walkcast/metrics_report.hpp"

namespace walkcast::backtest {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

num::Matrix feature_matrix(std::span<const features::FeatureRow> rows) {
  num::Matrix x(rows.size(), features::kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double* row = x.row(i);
    row[0] = rows[i].high_norm;
    row[1] = rows[i].low_norm;
    row[2] = rows[i].close_norm;
    row[3] = rows[i].volume_norm;
    row[4] = rows[i].range_norm;
  }
  return x;
}

// Per-position RMSE over a flat series; unusable (false) when some position
// received no samples.
std::pair<std::array<double, 5>, bool> position_rmse(std::span<const double> actual,
                                                     std::span<const double> predicted,
                                                     std::span<const int> positions) {
  std::array<double, 5> sums{};
  std::array<std::size_t, 5> counts{};
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    const auto p = static_cast<std::size_t>(positions[i]);
    sums[p] += e * e;
    ++counts[p];
  }
  std::array<double, 5> out{};
  for (std::size_t p = 0; p < 5; ++p) {
    if (counts[p] == 0) return {out, false};
    out[p] = std::sqrt(sums[p] / static_cast<double>(counts[p]));
  }
  return {out, true};
}

void finish_metrics(RunResult& result) {
  result.rmse_overall = report::rmse(result.actual, result.predicted);
  auto [per_day, usable] =
      position_rmse(result.actual, result.predicted, result.positions);
  result.rmse_per_day = per_day;
  result.has_day_rmse = usable;
}

std::vector<dataio::OhlcvRecord> flatten_weeks(
    std::span<const dataio::WeekBlock> weeks) {
  std::vector<dataio::OhlcvRecord> records;
  records.reserve(weeks.size() * 5);
  for (const auto& week : weeks)
    records.insert(records.end(), week.records.begin(), week.records.end());
  return records;
}

}  // namespace

// ---- classical daily evaluation ---------------------------------------------

ClassicEval evaluate_classic(const models::ModelSpec& spec,
                             const dataio::DatasetSplit& split, int lag) {
  if (lag != 0 && lag != 1)
    throw ConfigError("evaluate_classic: lag must be 0 or 1");
  if (split.train.empty() || split.test.empty())
    throw ValidationError("evaluate_classic: empty partition");

  const auto started = Clock::now();
  const auto scaler = features::fit_scaler(split.train);
  const auto train_set = features::build_supervised(split.train, scaler, lag);
  const auto model = models::fit(spec, train_set, scaler);

  ClassicEval eval;

  // Case I: every train day whose features exist (all of them at lag 0, all
  // but the first at lag 1). The target of design row i is record i + lag,
  // which fixes its block position.
  eval.train_result.predicted = models::predict(model, train_set.X);
  eval.train_result.actual = train_set.y;
  for (std::size_t i = 0; i < train_set.y.size(); ++i)
    eval.train_result.positions.push_back(
        static_cast<int>((i + static_cast<std::size_t>(lag)) % 5));

  // Case II: every test day. At lag 1 the first test day is predicted from
  // the last train day, so no test row is consumed for history.
  std::vector<features::FeatureRow> test_inputs;
  test_inputs.reserve(split.test.size());
  if (lag == 1)
    test_inputs.push_back(features::derive_features(split.train.back(), scaler));
  const std::size_t carried = test_inputs.size();
  for (std::size_t i = 0; i + carried < split.test.size(); ++i)
    test_inputs.push_back(features::derive_features(split.test[i], scaler));

  eval.test_result.predicted = models::predict(model, feature_matrix(test_inputs));
  eval.test_result.actual.reserve(split.test.size());
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    eval.test_result.actual.push_back(split.test[i].open);
    eval.test_result.positions.push_back(static_cast<int>(i % 5));
  }

  // Whole-week test partitions also group into forecast rounds.
  if (split.test.size() % 5 == 0) {
    for (std::size_t week = 0; week * 5 < split.test.size(); ++week) {
      ForecastRound round;
      round.week_index = week;
      for (std::size_t k = 0; k < 5; ++k) {
        round.predicted[k] = eval.test_result.predicted[week * 5 + k];
        round.actual[k] = eval.test_result.actual[week * 5 + k];
      }
      eval.test_result.rounds.push_back(round);
    }
  }

  const double elapsed = seconds_since(started);
  for (RunResult* result : {&eval.train_result, &eval.test_result}) {
    finish_metrics(*result);
    result->wall_time_sec = elapsed;
    result->seed = spec.seed;
    try {
      result->correlation = report::pearson_correlation(result->actual,
                                                        result->predicted);
    } catch (const ValidationError&) {
      // Constant predictions (degenerate models) leave r undefined.
    }
  }
  return eval;
}

// ---- weekly walk-forward ----------------------------------------------------

RunResult walk_forward(const lstm::LstmArchitecture& arch,
                       const dataio::DatasetSplit& split,
                       const lstm::TrainingConfig& config, bool retrain_each_week) {
  const std::size_t lookback_weeks =
      static_cast<std::size_t>(arch.input_steps) / 5;
  if (split.train_weeks.size() < lookback_weeks + 1)
    throw ValidationError("walk_forward: need at least " +
                          std::to_string(lookback_weeks + 1) + " train weeks, got " +
                          std::to_string(split.train_weeks.size()));
  if (split.test_weeks.empty())
    throw ValidationError("walk_forward: no test weeks");

  // Whole weeks only on both sides; the scaler still sees the full train
  // partition it was specified against.
  const auto scaler = features::fit_scaler(split.train);
  const auto train_records = flatten_weeks(split.train_weeks);

  std::vector<features::FeatureRow> history =
      features::derive_all(train_records, scaler);

  const auto started = Clock::now();
  auto trained = lstm::train(arch, lstm::make_windows(history, arch), config);
  trained.scaler = scaler;

  RunResult result;
  result.seed = config.seed;
  const auto steps = static_cast<std::size_t>(arch.input_steps);

  for (const dataio::WeekBlock& week : split.test_weeks) {
    num::Matrix window(steps, static_cast<std::size_t>(arch.input_features));
    for (std::size_t t = 0; t < steps; ++t)
      lstm::fill_window_row({window.row(t), window.cols()},
                            history[history.size() - steps + t],
                            arch.input_features);

    const auto scaled = trained.net.predict_scaled(window);
    ForecastRound round;
    round.week_index = week.index;
    for (std::size_t k = 0; k < 5; ++k) {
      round.predicted[k] = features::invert_open_scale(scaled[k], scaler);
      round.actual[k] = week.records[k].open;
      result.predicted.push_back(round.predicted[k]);
      result.actual.push_back(round.actual[k]);
      result.positions.push_back(static_cast<int>(k));
    }
    result.rounds.push_back(round);
    result.weight_fingerprints.push_back(
        weights_fingerprint(trained.net.parameters()));

    // Only now is the week's actual data revealed to the forecaster.
    for (const auto& record : week.records)
      history.push_back(features::derive_features(record, scaler));
    if (retrain_each_week) {
      trained = lstm::train(arch, lstm::make_windows(history, arch), config);
      trained.scaler = scaler;
    }
  }

  finish_metrics(result);
  result.wall_time_sec = seconds_since(started);
  return result;
}

// ---- multi-round protocol ----------------------------------------------------

std::vector<RunResult> run_rounds(const std::function<RunResult(std::uint64_t)>& task,
                                  int n_rounds, std::uint64_t base_seed, int threads) {
  if (n_rounds < 1) throw ConfigError("run_rounds: n_rounds must be >= 1");

  std::vector<RunResult> results(static_cast<std::size_t>(n_rounds));
  const auto total = static_cast<std::size_t>(n_rounds);

  if (threads <= 1) {
    for (std::size_t i = 0; i < total; ++i)
      results[i] = task(base_seed + static_cast<std::uint64_t>(i));
    return results;
  }

  // Rounds are independent; index-ordered results keep the output identical
  // to sequential execution.
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      try {
        results[i] = task(base_seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), total);
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

ColumnStats column_stats(std::span<const double> values) {
  if (values.empty()) throw ValidationError("column_stats: no values");
  ColumnStats stats;
  stats.min = values[0];
  stats.max = values[0];
  double total = 0.0;
  for (double v : values) {
    total += v;
    stats.min = std::min(stats.min, v);
    stats.max = std::max(stats.max, v);
  }
  stats.mean = total / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) {
    const double d = v - stats.mean;
    ss += d * d;
  }
  stats.sd = std::sqrt(ss / static_cast<double>(values.size()));
  return stats;
}

RoundsSummary summarize_rounds(std::span<const RunResult> results,
                               double test_mean_open) {
  if (results.empty()) throw ValidationError("summarize_rounds: no results");

  RoundsSummary summary;
  std::vector<double> column(results.size());

  auto stats_of = [&](auto getter) {
    for (std::size_t i = 0; i < results.size(); ++i) column[i] = getter(results[i]);
    return column_stats(column);
  };

  summary.rmse = stats_of([](const RunResult& r) { return r.rmse_overall; });
  for (std::size_t p = 0; p < 5; ++p)
    summary.day_rmse[p] =
        stats_of([p](const RunResult& r) { return r.rmse_per_day[p]; });
  summary.time_sec = stats_of([](const RunResult& r) { return r.wall_time_sec; });
  summary.test_mean_open = test_mean_open;
  summary.ratio_rmse_mean = report::ratio_rmse_mean(summary.rmse.mean, test_mean_open);
  return summary;
}

double mean_open(std::span<const dataio::OhlcvRecord> records) {
  if (records.empty()) throw ValidationError("mean_open: no records");
  double total = 0.0;
  for (const auto& record : records) total += record.open;
  return total / static_cast<double>(records.size());
}

// ---- grid search --------------------------------------------------------------

namespace {

// Enumerates the Cartesian product in odometer order, last axis fastest.
std::vector<std::map<std::string, double>> enumerate_grid(const ParamGrid& grid) {
  if (grid.axes.empty()) throw ConfigError("grid_search: empty grid");
  for (const auto& [name, values] : grid.axes)
    if (values.empty())
      throw ConfigError("grid_search: axis '" + name + "' has no values");

  std::vector<std::map<std::string, double>> points;
  std::vector<std::size_t> cursor(grid.axes.size(), 0);
  for (;;) {
    std::map<std::string, double> point;
    for (std::size_t a = 0; a < grid.axes.size(); ++a)
      point[grid.axes[a].first] = grid.axes[a].second[cursor[a]];
    points.push_back(std::move(point));

    std::size_t a = grid.axes.size();
    while (a-- > 0) {
      if (++cursor[a] < grid.axes[a].second.size()) break;
      cursor[a] = 0;
      if (a == 0) return points;
    }
  }
}

// Reduced split: all but the last holdout_weeks train weeks form the
// training side; the held-out weeks become the scoring side.
dataio::DatasetSplit validation_split(const dataio::DatasetSplit& split,
                                      double fraction) {
  const std::size_t weeks = split.train_weeks.size();
  const auto holdout = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(fraction * static_cast<double>(weeks))));
  if (holdout >= weeks)
    throw ValidationError("grid_search: validation holdout leaves no train weeks");

  dataio::DatasetSplit reduced;
  reduced.train_weeks.assign(split.train_weeks.begin(),
                             split.train_weeks.end() - static_cast<long>(holdout));
  reduced.test_weeks.assign(split.train_weeks.end() - static_cast<long>(holdout),
                            split.train_weeks.end());
  // Re-index scoring weeks from zero and rebuild the flat partitions.
  for (std::size_t i = 0; i < reduced.test_weeks.size(); ++i)
    reduced.test_weeks[i].index = i;
  reduced.train = flatten_weeks(reduced.train_weeks);
  reduced.test = flatten_weeks(reduced.test_weeks);
  return reduced;
}

GridResult sweep(const ParamGrid& grid,
                 const std::function<double(const std::map<std::string, double>&)>&
                     score_point) {
  GridResult result;
  bool have_best = false;
  for (auto& point : enumerate_grid(grid)) {
    GridPoint entry;
    entry.values = std::move(point);
    entry.score = score_point(entry.values);
    if (!have_best || entry.score < result.best.score) {
      result.best = entry;
      have_best = true;
    }
    result.trace.push_back(std::move(entry));
  }
  return result;
}

}  // namespace

GridResult grid_search(const models::ModelSpec& base, const ParamGrid& grid,
                       const dataio::DatasetSplit& split, int lag,
                       double validation_fraction) {
  const auto reduced = validation_split(split, validation_fraction);
  return sweep(grid, [&](const std::map<std::string, double>& values) {
    models::ModelSpec candidate = base;
    for (const auto& [key, value] : values) candidate.hyper[key] = value;
    return evaluate_classic(candidate, reduced, lag).test_result.rmse_overall;
  });
}

GridResult grid_search(lstm::ArchId id, const lstm::TrainingConfig& base,
                       const ParamGrid& grid, const dataio::DatasetSplit& split,
                       double validation_fraction) {
  const auto reduced = validation_split(split, validation_fraction);
  return sweep(grid, [&](const std::map<std::string, double>& values) {
    lstm::TrainingConfig config = base;
    int lstm_units = 200;
    int dense_units = 100;
    for (const auto& [key, value] : values) {
      if (key == "epochs")
        config.epochs = static_cast<int>(value);
      else if (key == "batch")
        config.batch = static_cast<int>(value);
      else if (key == "lr")
        config.lr = value;
      else if (key == "lstm_units")
        lstm_units = static_cast<int>(value);
      else if (key == "dense_units")
        dense_units = static_cast<int>(value);
      else
        throw ConfigError("grid_search: unknown parameter '" + key +
                          "' for lstm models");
    }
    const auto arch = lstm::make_architecture(id, lstm_units, dense_units);
    return walk_forward(arch, reduced, config).rmse_overall;
  });
}

std::uint64_t weights_fingerprint(std::span<num::Matrix* const> params) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const num::Matrix* m : params) {
    for (double v : m->values()) {
      std::uint64_t bits;
      static_assert(sizeof bits == sizeof v);
      std::memcpy(&bits, &v, sizeof bits);
      for (int byte = 0; byte < 8; ++byte) {
        hash ^= (bits >> (byte * 8)) & 0xff;
        hash *= 0x100000001b3ULL;
      }
    }
  }
  return hash;
}

}  // namespace walkcast::backtest
