#ifndef WALKCAST_FEATURES_HPP
#define WALKCAST_FEATURES_HPP

#include <span>
#include <vector>

#include "walkcast/dataio.hpp"
#include "walkcast/numcore.hpp"

namespace walkcast::features {

// Per-variable min-max extrema, fitted on the training partition only.
struct ScalerParams {
  struct Extrema {
    double min = 0.0;
    double max = 0.0;
    double span() const { return max - min; }
  };
  Extrema open, high, low, close, volume, range;

  bool operator==(const ScalerParams&) const = default;
};

// The five derived predictors plus the scaled open used as the neural target.
struct FeatureRow {
  double high_norm = 0.0;
  double low_norm = 0.0;
  double close_norm = 0.0;
  double volume_norm = 0.0;
  double range_norm = 0.0;
  double open_scaled = 0.0;
};

// Design matrix plus raw-point targets for the classical regressors.
// With lag = 1 row t's features come from day t-1 and y[t] is day t's open.
struct SupervisedSet {
  num::Matrix X;          // rows x 5: high, low, close, volume, range norms
  std::vector<double> y;  // raw open values
  int lag = 1;
};

inline constexpr int kFeatureCount = 5;

// Exact extrema over the training records; range extrema over per-record
// high - low. Throws ValidationError naming the variable when a column is
// constant (the affine map would be degenerate).
ScalerParams fit_scaler(std::span<const dataio::OhlcvRecord> train);

// Affine min-max maps. Test-partition values may fall outside [0, 1]; no
// clamping is applied.
FeatureRow derive_features(const dataio::OhlcvRecord& record, const ScalerParams& scaler);
std::vector<FeatureRow> derive_all(std::span<const dataio::OhlcvRecord> records,
                                   const ScalerParams& scaler);

double scale_open(double open, const ScalerParams& scaler);
double invert_open_scale(double value, const ScalerParams& scaler);

SupervisedSet build_supervised(std::span<const dataio::OhlcvRecord> records,
                               const ScalerParams& scaler, int lag);

// Debug export of the feature matrix (--dump-features).
std::string features_to_csv(std::span<const dataio::OhlcvRecord> records,
                            const ScalerParams& scaler);

}  // namespace walkcast::features

#endif  // WALKCAST_FEATURES_HPP
