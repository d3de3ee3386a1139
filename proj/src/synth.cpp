#include "walkcast/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "walkcast/errors.hpp"
#include "walkcast/rng.hpp"

namespace walkcast::synth {

Kind kind_from_string(std::string_view name) {
  if (name == "sine") return Kind::sine;
  if (name == "trend") return Kind::trend;
  if (name == "noise") return Kind::noise;
  throw ConfigError("unknown synth kind '" + std::string(name) +
                    "' (expected sine|trend|noise)");
}

std::vector<dataio::OhlcvRecord> generate_ohlcv(const SynthConfig& config) {
  if (config.days == 0) throw ConfigError("generate_ohlcv: days must be positive");

  Rng rng(config.seed);
  std::vector<dataio::OhlcvRecord> records;
  records.reserve(config.days);

  auto start = config.start_date.to_days();
  double walk = config.offset;

  for (std::size_t t = 0; t < config.days; ++t) {
    // weekday-only calendar: 5 trading days per 7 calendar days
    auto date = start + std::chrono::days(static_cast<long>((t / 5) * 7 + t % 5));

    double open = 0.0, next = 0.0;
    switch (config.kind) {
      case Kind::sine: {
        double w = 2.0 * std::numbers::pi / config.period_days;
        open = config.offset + config.amplitude * std::sin(w * static_cast<double>(t));
        next = config.offset + config.amplitude * std::sin(w * (static_cast<double>(t) + 0.5));
        break;
      }
      case Kind::trend: {
        open = config.trend_base + config.trend_slope * static_cast<double>(t);
        next = open + config.trend_slope * 0.5;
        break;
      }
      case Kind::noise: {
        open = walk;
        walk *= 1.0 + 0.01 * (rng.uniform() - 0.5);
        next = walk;
        break;
      }
    }

    dataio::OhlcvRecord r;
    r.date = dataio::Date::from_days(std::chrono::sys_days(date));
    r.open = open;
    r.close = next;
    r.high = std::max(open, next) * 1.005;
    r.low = std::min(open, next) * 0.995;
    r.volume = 1.0e6 + 1.0e4 * static_cast<double>(t % 97);
    records.push_back(r);
  }
  return records;
}

}  // namespace walkcast::synth
