#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "walkcast/errors.hpp"
#include "walkcast/features.hpp"
#include "walkcast/rng.hpp"
#include "walkcast/synth.hpp"

using namespace walkcast;

namespace {

std::vector<dataio::OhlcvRecord> fixture(std::size_t days, synth::Kind kind = synth::Kind::noise) {
  synth::SynthConfig config;
  config.kind = kind;
  config.days = days;
  return synth::generate_ohlcv(config);
}

}  // namespace

TEST_CASE("fit_scaler: extrema match their definition on a tiny set") {
  auto records = fixture(3);
  records[0].high = 100;
  records[1].high = 200;
  records[2].high = 300;
  auto scaler = features::fit_scaler(records);
  CHECK(scaler.high.min == 100.0);
  CHECK(scaler.high.max == 300.0);
}

TEST_CASE("fit_scaler: extrema equal an independent one-pass scan") {
  auto records = fixture(1045);
  auto scaler = features::fit_scaler(records);

  double h_min = records[0].high, h_max = records[0].high;
  double l_min = records[0].low, l_max = records[0].low;
  double c_min = records[0].close, c_max = records[0].close;
  double o_min = records[0].open, o_max = records[0].open;
  double v_min = records[0].volume, v_max = records[0].volume;
  double r_min = records[0].high - records[0].low;
  double r_max = r_min;
  for (const auto& r : records) {
    h_min = std::min(h_min, r.high); h_max = std::max(h_max, r.high);
    l_min = std::min(l_min, r.low); l_max = std::max(l_max, r.low);
    c_min = std::min(c_min, r.close); c_max = std::max(c_max, r.close);
    o_min = std::min(o_min, r.open); o_max = std::max(o_max, r.open);
    v_min = std::min(v_min, r.volume); v_max = std::max(v_max, r.volume);
    r_min = std::min(r_min, r.high - r.low);
    r_max = std::max(r_max, r.high - r.low);
  }
  CHECK(scaler.high.min == h_min);
  CHECK(scaler.high.max == h_max);
  CHECK(scaler.low.min == l_min);
  CHECK(scaler.low.max == l_max);
  CHECK(scaler.close.min == c_min);
  CHECK(scaler.close.max == c_max);
  CHECK(scaler.open.min == o_min);
  CHECK(scaler.open.max == o_max);
  CHECK(scaler.volume.min == v_min);
  CHECK(scaler.volume.max == v_max);
  CHECK(scaler.range.min == r_min);
  CHECK(scaler.range.max == r_max);
}

TEST_CASE("fit_scaler: constant column is rejected naming the variable") {
  auto records = fixture(1);
  try {
    (void)features::fit_scaler(records);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    // every column is constant with one record; some variable is named
    CHECK(std::string(e.what()).find("open") != std::string::npos);
  }

  auto flat_volume = fixture(10);
  for (auto& r : flat_volume) r.volume = 999.0;
  try {
    (void)features::fit_scaler(flat_volume);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("volume") != std::string::npos);
  }
}

TEST_CASE("derive_features: affine endpoints and midpoint") {
  auto records = fixture(20);
  auto scaler = features::fit_scaler(records);

  dataio::OhlcvRecord probe = records[5];
  probe.high = scaler.high.max;
  probe.low = scaler.low.min;
  auto row = features::derive_features(probe, scaler);
  CHECK(row.high_norm == doctest::Approx(1.0));
  CHECK(row.low_norm == doctest::Approx(0.0));

  probe.high = 0.5 * (scaler.high.min + scaler.high.max);
  row = features::derive_features(probe, scaler);
  CHECK(row.high_norm == doctest::Approx(0.5));
}

TEST_CASE("derive_features: monotone in the underlying value") {
  auto records = fixture(20);
  auto scaler = features::fit_scaler(records);
  dataio::OhlcvRecord a = records[3];
  dataio::OhlcvRecord b = a;
  b.high = a.high + 1.0;
  CHECK(features::derive_features(b, scaler).high_norm >
        features::derive_features(a, scaler).high_norm);
}

TEST_CASE("derive_features: training rows all land in the unit interval") {
  auto records = fixture(250);
  auto scaler = features::fit_scaler(records);
  for (const auto& rec : records) {
    auto row = features::derive_features(rec, scaler);
    for (double v : {row.high_norm, row.low_norm, row.close_norm,
                     row.volume_norm, row.range_norm, row.open_scaled}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("open scaling: endpoints and random round-trip under 1e-9 relative") {
  auto records = fixture(50);
  auto scaler = features::fit_scaler(records);
  CHECK(features::invert_open_scale(0.0, scaler) == doctest::Approx(scaler.open.min));
  CHECK(features::invert_open_scale(1.0, scaler) == doctest::Approx(scaler.open.max));

  Rng rng(123);
  for (int i = 0; i < 10000; ++i) {
    double x = rng.uniform(scaler.open.min * 0.5, scaler.open.max * 1.5);
    double back = features::invert_open_scale(features::scale_open(x, scaler), scaler);
    CHECK(std::abs(back - x) <= 1e-9 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("build_supervised: row counts for lag 0 and 1") {
  auto records = fixture(1045);
  auto scaler = features::fit_scaler(records);

  auto lag0 = features::build_supervised(records, scaler, 0);
  CHECK(lag0.X.rows() == 1045);
  CHECK(lag0.X.cols() == 5);
  CHECK(lag0.y.size() == 1045);

  auto lag1 = features::build_supervised(records, scaler, 1);
  CHECK(lag1.X.rows() == 1044);
  CHECK(lag1.y.size() == 1044);
}

TEST_CASE("build_supervised: feature row t comes from day t-lag, target from day t") {
  auto records = fixture(30);
  auto scaler = features::fit_scaler(records);
  auto set = features::build_supervised(records, scaler, 1);
  for (std::size_t i = 0; i < set.X.rows(); ++i) {
    auto row = features::derive_features(records[i], scaler);
    CHECK(set.X(i, 0) == row.high_norm);
    CHECK(set.X(i, 1) == row.low_norm);
    CHECK(set.X(i, 2) == row.close_norm);
    CHECK(set.X(i, 3) == row.volume_norm);
    CHECK(set.X(i, 4) == row.range_norm);
    CHECK(set.y[i] == records[i + 1].open);
  }

  auto same_day = features::build_supervised(records, scaler, 0);
  for (std::size_t i = 0; i < same_day.X.rows(); ++i) {
    CHECK(same_day.y[i] == records[i].open);
  }
}

TEST_CASE("build_supervised: too few records is a size error") {
  auto records = fixture(2);
  auto scaler = features::fit_scaler(records);
  std::vector<dataio::OhlcvRecord> one(records.begin(), records.begin() + 1);
  CHECK_THROWS_AS((void)features::build_supervised(one, scaler, 1), ValidationError);
  CHECK_THROWS_AS((void)features::build_supervised(records, scaler, 2), ConfigError);
}

TEST_CASE("features_to_csv: header plus one line per record") {
  auto records = fixture(8);
  auto scaler = features::fit_scaler(records);
  std::string csv = features::features_to_csv(records, scaler);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.rfind("date,high_norm,low_norm,close_norm,volume_norm,range_norm,open_scaled\n", 0) == 0);
}
