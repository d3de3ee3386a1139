#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "walkcast/errors.hpp"
#include "walkcast/metrics_report.hpp"

namespace walkcast::report {

namespace {

using nlohmann::ordered_json;

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace

// ---- metrics ---------------------------------------------------------------

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size())
    throw ValidationError("rmse: length mismatch: " + std::to_string(actual.size()) +
                          " vs " + std::to_string(predicted.size()));
  if (actual.empty()) throw ValidationError("rmse: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    total += e * e;
  }
  return std::sqrt(total / static_cast<double>(actual.size()));
}

double pearson_correlation(std::span<const double> actual,
                           std::span<const double> predicted) {
  if (actual.size() != predicted.size())
    throw ValidationError("pearson_correlation: length mismatch");
  const auto n = static_cast<double>(actual.size());
  if (actual.size() < 2)
    throw ValidationError("pearson_correlation: need at least 2 pairs");

  double mean_a = 0.0, mean_p = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    mean_a += actual[i];
    mean_p += predicted[i];
  }
  mean_a /= n;
  mean_p /= n;

  double cov = 0.0, var_a = 0.0, var_p = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double da = actual[i] - mean_a;
    const double dp = predicted[i] - mean_p;
    cov += da * dp;
    var_a += da * da;
    var_p += dp * dp;
  }
  if (var_a == 0.0 || var_p == 0.0)
    throw ValidationError("pearson_correlation: undefined for constant input");
  return cov / std::sqrt(var_a * var_p);
}

std::array<double, 5> per_day_rmse(std::span<const backtest::ForecastRound> rounds) {
  if (rounds.empty()) throw ValidationError("per_day_rmse: no rounds");
  std::array<double, 5> out{};
  for (std::size_t p = 0; p < 5; ++p) {
    double total = 0.0;
    for (const auto& round : rounds) {
      const double e = round.actual[p] - round.predicted[p];
      total += e * e;
    }
    out[p] = std::sqrt(total / static_cast<double>(rounds.size()));
  }
  return out;
}

double ratio_rmse_mean(double rmse_value, double mean_open) {
  if (!(mean_open > 0.0))
    throw ValidationError("ratio_rmse_mean: mean open must be positive");
  return rmse_value / mean_open;
}

// ---- report assembly -------------------------------------------------------

EvalReport build_report(const std::string& model_id,
                        const std::string& config_digest,
                        std::span<const backtest::RunResult> results,
                        double test_mean_open) {
  if (results.empty()) throw ValidationError("build_report: no results");

  EvalReport report;
  report.model_id = model_id;
  report.config_digest = config_digest;
  report.test_mean_open = test_mean_open;

  report.rounds.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    RoundRow row;
    row.round = static_cast<int>(i) + 1;
    row.rmse = results[i].rmse_overall;
    row.day_rmse = results[i].rmse_per_day;
    row.time_sec = results[i].wall_time_sec;
    report.rounds.push_back(row);
  }

  const auto summary = backtest::summarize_rounds(results, test_mean_open);
  auto fill = [](ColumnValues& dst, const backtest::RoundsSummary& s,
                 double backtest::ColumnStats::*member) {
    dst.rmse = s.rmse.*member;
    for (std::size_t p = 0; p < 5; ++p) dst.day[p] = s.day_rmse[p].*member;
    dst.time_sec = s.time_sec.*member;
  };
  fill(report.agg_mean, summary, &backtest::ColumnStats::mean);
  fill(report.agg_min, summary, &backtest::ColumnStats::min);
  fill(report.agg_max, summary, &backtest::ColumnStats::max);
  fill(report.agg_sd, summary, &backtest::ColumnStats::sd);
  report.ratio_rmse_mean = summary.ratio_rmse_mean;

  const bool all_correlated =
      std::all_of(results.begin(), results.end(),
                  [](const backtest::RunResult& r) { return r.correlation.has_value(); });
  if (all_correlated) {
    // Pooled over all rounds' daily pairs; identical to the per-round value
    // when rounds coincide (deterministic models, single round).
    std::vector<double> actual, predicted;
    for (const auto& r : results) {
      actual.insert(actual.end(), r.actual.begin(), r.actual.end());
      predicted.insert(predicted.end(), r.predicted.begin(), r.predicted.end());
    }
    report.correlation = pearson_correlation(actual, predicted);
  }
  return report;
}

// ---- rendering -------------------------------------------------------------

namespace {

ordered_json columns_to_json(const ColumnValues& c) {
  return ordered_json{{"rmse", c.rmse}, {"day_rmse", c.day}, {"time_sec", c.time_sec}};
}

ColumnValues columns_from_json(const ordered_json& j) {
  ColumnValues c;
  c.rmse = j.at("rmse").get<double>();
  const auto& day = j.at("day_rmse");
  if (!day.is_array() || day.size() != 5)
    throw ValidationError("report: day_rmse must hold five values");
  for (std::size_t p = 0; p < 5; ++p) c.day[p] = day[p].get<double>();
  c.time_sec = j.at("time_sec").get<double>();
  return c;
}

}  // namespace

std::string render_json(const EvalReport& report) {
  ordered_json rounds = ordered_json::array();
  for (const auto& row : report.rounds)
    rounds.push_back(ordered_json{{"round", row.round},
                                  {"rmse", row.rmse},
                                  {"day_rmse", row.day_rmse},
                                  {"time_sec", row.time_sec}});

  ordered_json j{{"schema_version", report.schema_version},
                 {"model_id", report.model_id},
                 {"config_digest", report.config_digest},
                 {"rounds", std::move(rounds)},
                 {"aggregates",
                  ordered_json{{"mean", columns_to_json(report.agg_mean)},
                               {"min", columns_to_json(report.agg_min)},
                               {"max", columns_to_json(report.agg_max)},
                               {"sd", columns_to_json(report.agg_sd)}}},
                 {"ratio_rmse_mean", report.ratio_rmse_mean}};
  if (report.correlation) j["correlation"] = *report.correlation;
  j["test_mean_open"] = report.test_mean_open;
  return j.dump(2) + "\n";
}

std::string render_csv(const EvalReport& report) {
  std::string out = "Round,RMSE,Mon,Tue,Wed,Thu,Fri,Time\n";
  auto append_columns = [&](const std::string& label, const ColumnValues& c) {
    out += label + "," + fixed(c.rmse, 2);
    for (double d : c.day) out += "," + fixed(d, 2);
    out += "," + fixed(c.time_sec, 2) + "\n";
  };
  for (const auto& row : report.rounds) {
    ColumnValues c;
    c.rmse = row.rmse;
    c.day = row.day_rmse;
    c.time_sec = row.time_sec;
    append_columns(std::to_string(row.round), c);
  }
  append_columns("Mean", report.agg_mean);
  append_columns("Min", report.agg_min);
  append_columns("Max", report.agg_max);
  append_columns("SD", report.agg_sd);
  out += "RMSE/Mean," + fixed(report.ratio_rmse_mean, 4) + "\n";
  if (report.correlation) out += "Correlation," + fixed(*report.correlation, 4) + "\n";
  return out;
}

std::string render_svg(const EvalReport& report, std::size_t round_index) {
  if (round_index >= report.rounds.size())
    throw ValidationError("render_svg: round index out of range");
  const RoundRow& row = report.rounds[round_index];
  const double peak = std::max(
      1e-12, *std::max_element(row.day_rmse.begin(), row.day_rmse.end()));

  constexpr double kWidth = 480.0, kHeight = 320.0;
  constexpr double kMarginLeft = 50.0, kMarginBottom = 40.0, kMarginTop = 40.0;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const double bar_w = 60.0;

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"320\" "
      "viewBox=\"0 0 480 320\">\n"
      "  <rect width=\"480\" height=\"320\" fill=\"white\"/>\n"
      "  <text x=\"240\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      "font-size=\"14\">" +
      report.model_id + " round " + std::to_string(row.round) +
      " day-wise RMSE</text>\n";
  for (std::size_t p = 0; p < 5; ++p) {
    const double h = row.day_rmse[p] / peak * plot_h;
    const double x = kMarginLeft + static_cast<double>(p) * (bar_w + 20.0);
    const double y = kHeight - kMarginBottom - h;
    svg += "  <rect x=\"" + fixed(x, 1) + "\" y=\"" + fixed(y, 1) + "\" width=\"" +
           fixed(bar_w, 1) + "\" height=\"" + fixed(h, 1) +
           "\" fill=\"steelblue\"/>\n";
    svg += "  <text x=\"" + fixed(x + bar_w / 2.0, 1) + "\" y=\"" +
           fixed(kHeight - kMarginBottom + 16.0, 1) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           std::string(backtest::kPositionLabels[p]) + "</text>\n";
    svg += "  <text x=\"" + fixed(x + bar_w / 2.0, 1) + "\" y=\"" + fixed(y - 4.0, 1) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           fixed(row.day_rmse[p], 2) + "</text>\n";
  }
  svg += "  <line x1=\"" + fixed(kMarginLeft - 10.0, 1) + "\" y1=\"" +
         fixed(kHeight - kMarginBottom, 1) + "\" x2=\"" + fixed(kWidth - 20.0, 1) +
         "\" y2=\"" + fixed(kHeight - kMarginBottom, 1) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "</svg>\n";
  return svg;
}

EvalReport parse_report(const std::string& json_text) {
  const ordered_json j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("report: malformed JSON");
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion)
      throw ConfigError("report: unsupported schema_version " +
                        std::to_string(version) + " (expected " +
                        std::to_string(kSchemaVersion) + ")");

    EvalReport report;
    report.schema_version = version;
    report.model_id = j.at("model_id").get<std::string>();
    report.config_digest = j.at("config_digest").get<std::string>();
    for (const auto& entry : j.at("rounds")) {
      RoundRow row;
      row.round = entry.at("round").get<int>();
      row.rmse = entry.at("rmse").get<double>();
      const auto& day = entry.at("day_rmse");
      if (!day.is_array() || day.size() != 5)
        throw ValidationError("report: day_rmse must hold five values");
      for (std::size_t p = 0; p < 5; ++p) row.day_rmse[p] = day[p].get<double>();
      row.time_sec = entry.at("time_sec").get<double>();
      report.rounds.push_back(row);
    }
    const auto& agg = j.at("aggregates");
    report.agg_mean = columns_from_json(agg.at("mean"));
    report.agg_min = columns_from_json(agg.at("min"));
    report.agg_max = columns_from_json(agg.at("max"));
    report.agg_sd = columns_from_json(agg.at("sd"));
    report.ratio_rmse_mean = j.at("ratio_rmse_mean").get<double>();
    if (j.contains("correlation"))
      report.correlation = j.at("correlation").get<double>();
    report.test_mean_open = j.at("test_mean_open").get<double>();
    return report;
  } catch (const ordered_json::exception& err) {
    throw ValidationError(std::string("report: ") + err.what());
  }
}

}  // namespace walkcast::report
