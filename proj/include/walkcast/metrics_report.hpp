#ifndef WALKCAST_METRICS_REPORT_HPP
#define WALKCAST_METRICS_REPORT_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "walkcast/backtest.hpp"

namespace walkcast::report {

inline constexpr int kSchemaVersion = 1;

// ---- metrics ---------------------------------------------------------------

double rmse(std::span<const double> actual, std::span<const double> predicted);

// Standard product-moment r. Throws ValidationError when either sequence is
// constant (zero variance makes r undefined).
double pearson_correlation(std::span<const double> actual,
                           std::span<const double> predicted);

// Position-p RMSE across all rounds' position-p errors.
std::array<double, 5> per_day_rmse(std::span<const backtest::ForecastRound> rounds);

// RMSE relative to the mean actual open; scale-free across price regimes.
double ratio_rmse_mean(double rmse_value, double mean_open);

// ---- report ----------------------------------------------------------------

struct RoundRow {
  int round = 0;  // repetition round, 1-based in rendered tables
  double rmse = 0.0;
  std::array<double, 5> day_rmse{};
  double time_sec = 0.0;
};

// One value per report column.
struct ColumnValues {
  double rmse = 0.0;
  std::array<double, 5> day{};
  double time_sec = 0.0;
};

struct EvalReport {
  int schema_version = kSchemaVersion;
  std::string model_id;
  std::string config_digest;
  std::vector<RoundRow> rounds;
  ColumnValues agg_mean, agg_min, agg_max, agg_sd;
  double ratio_rmse_mean = 0.0;
  std::optional<double> correlation;  // classical daily mode only
  double test_mean_open = 0.0;
};

// Assembles the rows and aggregates from per-seed results. correlation is
// pooled over all rounds' flat series when any result carries one.
EvalReport build_report(const std::string& model_id,
                        const std::string& config_digest,
                        std::span<const backtest::RunResult> results,
                        double test_mean_open);

// Full-precision JSON following the versioned schema; byte-stable.
std::string render_json(const EvalReport& report);

// Table-layout CSV: header, one row per round, then Mean/Min/Max/SD and a
// ratio row (plus a correlation row when present). RMSE and time columns at
// 2 decimals, ratios at 4.
std::string render_csv(const EvalReport& report);

// Static bar chart of one round's per-day RMSE.
std::string render_svg(const EvalReport& report, std::size_t round_index = 0);

// Parses render_json output. Throws ConfigError on a schema-version
// mismatch, ValidationError on structural problems.
EvalReport parse_report(const std::string& json_text);

}  // namespace walkcast::report

#endif  // WALKCAST_METRICS_REPORT_HPP
