#ifndef WALKCAST_SYNTH_HPP
#define WALKCAST_SYNTH_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "walkcast/dataio.hpp"

namespace walkcast::synth {

enum class Kind { sine, trend, noise };

Kind kind_from_string(std::string_view name);

struct SynthConfig {
  Kind kind = Kind::sine;
  std::size_t days = 300;
  std::uint64_t seed = 42;
  // sine parameters
  double amplitude = 1000.0;
  double offset = 10000.0;
  double period_days = 50.0;
  // trend parameters
  double trend_base = 8000.0;
  double trend_slope = 5.0;
  dataio::Date start_date{2014, 12, 29};  // a Monday
};

// Deterministic OHLCV series on a weekday-only calendar (no holidays), so a
// span of 5k trading days always covers exactly k blocked weeks. 1460 days
// from the default start reproduce the 1045/415-record reference split.
std::vector<dataio::OhlcvRecord> generate_ohlcv(const SynthConfig& config);

}  // namespace walkcast::synth

#endif  // WALKCAST_SYNTH_HPP
