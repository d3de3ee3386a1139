#include "walkcast/features.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "walkcast/errors.hpp"

namespace walkcast::features {

namespace {

void update(ScalerParams::Extrema& e, double v, bool first) {
  if (first) {
    e.min = e.max = v;
  } else {
    if (v < e.min) e.min = v;
    if (v > e.max) e.max = v;
  }
}

void check_nondegenerate(const ScalerParams::Extrema& e, const char* name) {
  if (!(e.max > e.min))
    throw ValidationError(std::string("fit_scaler: variable '") + name +
                          "' is constant; min-max scaling undefined");
}

double affine(double v, const ScalerParams::Extrema& e) {
  return (v - e.min) / e.span();
}

}  // namespace

ScalerParams fit_scaler(std::span<const dataio::OhlcvRecord> train) {
  if (train.empty()) throw ValidationError("fit_scaler: empty training partition");
  ScalerParams s;
  bool first = true;
  for (const auto& r : train) {
    update(s.open, r.open, first);
    update(s.high, r.high, first);
    update(s.low, r.low, first);
    update(s.close, r.close, first);
    update(s.volume, r.volume, first);
    update(s.range, r.high - r.low, first);
    first = false;
  }
  check_nondegenerate(s.open, "open");
  check_nondegenerate(s.high, "high");
  check_nondegenerate(s.low, "low");
  check_nondegenerate(s.close, "close");
  check_nondegenerate(s.volume, "volume");
  check_nondegenerate(s.range, "range");
  return s;
}

FeatureRow derive_features(const dataio::OhlcvRecord& record, const ScalerParams& scaler) {
  FeatureRow f;
  f.high_norm = affine(record.high, scaler.high);
  f.low_norm = affine(record.low, scaler.low);
  f.close_norm = affine(record.close, scaler.close);
  f.volume_norm = affine(record.volume, scaler.volume);
  f.range_norm = affine(record.high - record.low, scaler.range);
  f.open_scaled = affine(record.open, scaler.open);
  for (double v : {f.high_norm, f.low_norm, f.close_norm, f.volume_norm, f.range_norm,
                   f.open_scaled})
    if (!std::isfinite(v))
      throw ValidationError("derive_features: non-finite feature for date " +
                            record.date.iso());
  return f;
}

std::vector<FeatureRow> derive_all(std::span<const dataio::OhlcvRecord> records,
                                   const ScalerParams& scaler) {
  std::vector<FeatureRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(derive_features(r, scaler));
  return rows;
}

double scale_open(double open, const ScalerParams& scaler) {
  return affine(open, scaler.open);
}

double invert_open_scale(double value, const ScalerParams& scaler) {
  return value * scaler.open.span() + scaler.open.min;
}

SupervisedSet build_supervised(std::span<const dataio::OhlcvRecord> records,
                               const ScalerParams& scaler, int lag) {
  if (lag != 0 && lag != 1) throw ConfigError("build_supervised: lag must be 0 or 1");
  if (records.size() <= static_cast<std::size_t>(lag))
    throw ValidationError("build_supervised: need more than " + std::to_string(lag) +
                          " records, got " + std::to_string(records.size()));

  SupervisedSet set;
  set.lag = lag;
  std::size_t n = records.size() - static_cast<std::size_t>(lag);
  set.X = num::Matrix(n, kFeatureCount);
  set.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow f = derive_features(records[i], scaler);
    double* row = set.X.row(i);
    row[0] = f.high_norm;
    row[1] = f.low_norm;
    row[2] = f.close_norm;
    row[3] = f.volume_norm;
    row[4] = f.range_norm;
    set.y.push_back(records[i + static_cast<std::size_t>(lag)].open);
  }
  return set;
}

std::string features_to_csv(std::span<const dataio::OhlcvRecord> records,
                            const ScalerParams& scaler) {
  std::string out = "date,high_norm,low_norm,close_norm,volume_norm,range_norm,open_scaled\n";
  char buf[192];
  for (const auto& r : records) {
    FeatureRow f = derive_features(r, scaler);
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.date.iso().c_str(), f.high_norm, f.low_norm, f.close_norm,
                  f.volume_norm, f.range_norm, f.open_scaled);
    out += buf;
  }
  return out;
}

}  // namespace walkcast::features
