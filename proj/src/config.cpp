#include "walkcast/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string_view>
#include <thread>

#include "walkcast/errors.hpp"
#include "walkcast/rng.hpp"

namespace walkcast::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

int parse_int(std::string_view value, std::string_view key) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config: key '" + std::string(key) +
                      "' expects an integer, got '" + std::string(value) + "'");
  }
  return out;
}

std::uint64_t parse_seed(std::string_view value, std::string_view key) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config: key '" + std::string(key) +
                      "' expects a non-negative integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view value, std::string_view key) {
  std::string text(value);
  char* end = nullptr;
  double out = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty()) {
    throw ConfigError("config: key '" + std::string(key) +
                      "' expects a number, got '" + text + "'");
  }
  return out;
}

bool parse_bool(std::string_view value, std::string_view key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: key '" + std::string(key) +
                    "' expects true/false, got '" + std::string(value) + "'");
}

dataio::Date parse_date(std::string_view value, std::string_view key) {
  try {
    return dataio::Date::parse_iso(value);
  } catch (const Error&) {
    throw ConfigError("config: key '" + std::string(key) +
                      "' expects YYYY-MM-DD, got '" + std::string(value) + "'");
  }
}

// One `param = v1, v2, ...` line inside [grid].
std::vector<double> parse_value_list(std::string_view value,
                                     std::string_view key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string_view item =
        trim(value.substr(start, comma == std::string_view::npos
                                     ? std::string_view::npos
                                     : comma - start));
    if (item.empty()) {
      throw ConfigError("config: [grid] key '" + std::string(key) +
                        "' has an empty value");
    }
    out.push_back(parse_double(item, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

const std::set<std::string, std::less<>> kKnownModels = {
    "ols",  "mars",  "cart",  "bagging", "boosting", "rf",
    "ann",  "svr",   "lstm1", "lstm2",   "lstm3",    "lstm4"};

}  // namespace

void RunConfig::validate() const {
  if (!kKnownModels.contains(model)) {
    throw ConfigError("config: unknown model '" + model + "'");
  }
  if (rounds < 1) {
    throw ConfigError("config: rounds must be >= 1, got " +
                      std::to_string(rounds));
  }
  if (lag != 0 && lag != 1) {
    throw ConfigError("config: lag must be 0 or 1, got " + std::to_string(lag));
  }
  if (!(train_start <= train_end) || !(test_start <= test_end)) {
    throw ConfigError("config: date ranges must be ordered");
  }
  if (!(train_end < test_start)) {
    throw ConfigError("config: train window must end before the test window");
  }
  if (epochs && *epochs < 1) {
    throw ConfigError("config: epochs must be >= 1");
  }
  if (batch && *batch < 1) {
    throw ConfigError("config: batch must be >= 1");
  }
  if (lr && !(*lr > 0.0)) {
    throw ConfigError("config: lr must be positive");
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  RunConfig config = std::move(base);
  bool in_grid = false;
  std::istringstream lines(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[grid]") {
      in_grid = true;
      continue;
    }
    if (line.front() == '[') {
      throw ConfigError("config: unknown section '" + std::string(line) +
                        "' at line " + std::to_string(line_no));
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: expected key=value at line " +
                        std::to_string(line_no));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config: empty key at line " + std::to_string(line_no));
    }

    if (in_grid) {
      for (const auto& axis : config.grid.axes) {
        if (axis.first == key) {
          throw ConfigError("config: [grid] repeats parameter '" + key + "'");
        }
      }
      config.grid.axes.emplace_back(key, parse_value_list(value, key));
      continue;
    }

    if (key == "data") {
      config.data_path = value;
    } else if (key == "model") {
      config.model = value;
    } else if (key == "rounds") {
      config.rounds = parse_int(value, key);
    } else if (key == "seed") {
      config.seed = parse_seed(value, key);
    } else if (key == "lag") {
      config.lag = parse_int(value, key);
    } else if (key == "train_start") {
      config.train_start = parse_date(value, key);
    } else if (key == "train_end") {
      config.train_end = parse_date(value, key);
    } else if (key == "test_start") {
      config.test_start = parse_date(value, key);
    } else if (key == "test_end") {
      config.test_end = parse_date(value, key);
    } else if (key == "retrain_weekly") {
      config.retrain_each_week = parse_bool(value, key);
    } else if (key == "paper_mode") {
      config.paper_mode = parse_bool(value, key);
    } else if (key == "emit_timing") {
      config.emit_timing = parse_bool(value, key);
    } else if (key == "epochs") {
      config.epochs = parse_int(value, key);
    } else if (key == "batch") {
      config.batch = parse_int(value, key);
    } else if (key == "lr") {
      config.lr = parse_double(value, key);
    } else if (key == "out") {
      config.output_dir = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "' at line " +
                        std::to_string(line_no));
    }
  }
  return config;
}

std::string canonical_config(const RunConfig& config) {
  std::ostringstream out;
  out << "model=" << config.model << '\n';
  out << "rounds=" << config.rounds << '\n';
  out << "seed=" << config.seed << '\n';
  out << "lag=" << (config.paper_mode ? 0 : config.lag) << '\n';
  out << "retrain_weekly=" << (config.retrain_each_week ? 1 : 0) << '\n';
  out << "train_start=" << config.train_start.iso() << '\n';
  out << "train_end=" << config.train_end.iso() << '\n';
  out << "test_start=" << config.test_start.iso() << '\n';
  out << "test_end=" << config.test_end.iso() << '\n';
  auto optional_int = [&out](const char* key, const std::optional<int>& v) {
    out << key << '=';
    if (v) out << *v;
    out << '\n';
  };
  optional_int("epochs", config.epochs);
  optional_int("batch", config.batch);
  out << "lr=";
  if (config.lr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *config.lr);
    out << buf;
  }
  out << '\n';
  for (const auto& [name, values] : config.grid.axes) {
    out << "grid." << name << '=';
    for (std::size_t i = 0; i < values.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string config_digest(const RunConfig& config) {
  std::string canon = canonical_config(config);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t resolve_threads(int rounds) {
  std::size_t limit = rounds > 0 ? static_cast<std::size_t>(rounds) : 1;
  if (const char* env = std::getenv("WALKCAST_THREADS")) {
    std::string_view text(env);
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) {
      throw ConfigError(
          "config: WALKCAST_THREADS expects a non-negative integer, got '" +
          std::string(text) + "'");
    }
    if (value == 0) return 1;
    return std::min(static_cast<std::size_t>(value), limit);
  }
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return std::min(hw, limit);
}

}  // namespace walkcast::cli
