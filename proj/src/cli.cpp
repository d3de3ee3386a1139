#include "walkcast/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "walkcast/backtest.hpp"
#include "walkcast/classic_models.hpp"
#include "walkcast/errors.hpp"
#include "walkcast/lstm_models.hpp"
#include "walkcast/metrics_report.hpp"
#include "walkcast/synth.hpp"

namespace fs = std::filesystem;

namespace walkcast::cli {
namespace {

// Missing/unreadable inputs are the caller's mistake (exit 2); failures while
// writing results are environment problems (exit 4).
std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot read '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw ValidationError("read error on '" + path.string() + "'");
  }
  return std::move(buffer).str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << content;
  out.flush();
  if (!out) {
    throw IoError("write error on '" + path.string() + "'");
  }
}

fs::path ensure_output_dir(const std::string& dir) {
  fs::path path = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + path.string() + "': " +
                  ec.message());
  }
  return path;
}

// Every value that arrived on the command line, so flags can win over the
// config file without clobbering its other keys.
struct FlagValues {
  std::optional<std::string> config_path;
  std::optional<std::string> data_path;
  std::optional<std::string> model;
  std::optional<int> rounds;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> lag;
  bool retrain_weekly = false;
  bool paper_mode = false;
  bool emit_timing = false;
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<double> lr;
};

void add_run_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--config", flags.config_path,
                  "key=value config file; flags override it");
  cmd->add_option("--data", flags.data_path, "OHLCV CSV input");
  cmd->add_option("--model", flags.model,
                  "ols|mars|cart|bagging|boosting|rf|ann|svr|lstm1..lstm4");
  cmd->add_option("--rounds", flags.rounds, "repetition rounds");
  cmd->add_option("--seed", flags.seed, "base seed; round i uses seed+i");
  cmd->add_option("--out", flags.output_dir, "output directory");
  cmd->add_option("--lag", flags.lag,
                  "classical test inputs: 1 = previous day, 0 = same day");
  cmd->add_flag("--retrain-weekly", flags.retrain_weekly,
                "refit after each appended test week");
  cmd->add_flag("--paper-mode", flags.paper_mode, "force lag=0");
  cmd->add_flag("--emit-timing", flags.emit_timing,
                "record measured wall times in reports (nondeterministic)");
  cmd->add_option("--epochs", flags.epochs, "training epochs override");
  cmd->add_option("--batch", flags.batch, "minibatch size override");
  cmd->add_option("--lr", flags.lr, "learning rate override");
}

RunConfig resolve_config(const FlagValues& flags) {
  RunConfig config;
  if (flags.config_path) {
    config = parse_config_text(read_text_file(*flags.config_path));
  }
  if (flags.data_path) config.data_path = *flags.data_path;
  if (flags.model) config.model = *flags.model;
  if (flags.rounds) config.rounds = *flags.rounds;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.lag) config.lag = *flags.lag;
  if (flags.retrain_weekly) config.retrain_each_week = true;
  if (flags.paper_mode) config.paper_mode = true;
  if (flags.emit_timing) config.emit_timing = true;
  if (flags.epochs) config.epochs = *flags.epochs;
  if (flags.batch) config.batch = *flags.batch;
  if (flags.lr) config.lr = *flags.lr;
  if (config.paper_mode) config.lag = 0;
  config.validate();
  return config;
}

bool is_lstm_model(const std::string& model) {
  return model.rfind("lstm", 0) == 0;
}

dataio::DatasetSplit load_split(const RunConfig& config) {
  if (config.data_path.empty()) {
    throw ConfigError("no input data: pass --data or set data= in the config");
  }
  dataio::ParseResult parsed = dataio::parse_ohlcv_csv(read_text_file(config.data_path));
  return dataio::split_by_date(parsed.records, config.train_start,
                               config.train_end, config.test_start,
                               config.test_end);
}

models::ModelSpec classic_spec(const RunConfig& config) {
  models::ModelSpec spec;
  spec.family = models::family_from_string(config.model);
  spec.seed = config.seed;
  // Overrides land in the hyper map; families without the key reject it.
  if (config.epochs) spec.hyper["epochs"] = static_cast<double>(*config.epochs);
  if (config.batch) spec.hyper["batch"] = static_cast<double>(*config.batch);
  if (config.lr) spec.hyper["lr"] = *config.lr;
  return spec;
}

lstm::TrainingConfig lstm_config(const RunConfig& config) {
  lstm::TrainingConfig training;
  if (config.epochs) training.epochs = *config.epochs;
  if (config.batch) training.batch = *config.batch;
  if (config.lr) training.lr = *config.lr;
  training.seed = config.seed;
  return training;
}

void scrub_times(std::vector<backtest::RunResult>& results) {
  for (auto& result : results) result.wall_time_sec = 0.0;
}

// Writes the JSON/CSV/SVG triple and echoes the aggregate CSV rows (Mean,
// RMSE/Mean, Correlation) prefixed with the report name.
void emit_report(const report::EvalReport& eval, const fs::path& dir,
                 std::ostream& out) {
  const std::string base = eval.model_id + ".report";
  write_text_file(dir / (base + ".json"), report::render_json(eval));
  const std::string csv = report::render_csv(eval);
  write_text_file(dir / (base + ".csv"), csv);
  write_text_file(dir / (base + ".svg"), report::render_svg(eval));

  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("Mean,", 0) == 0 || line.rfind("RMSE/Mean,", 0) == 0 ||
        line.rfind("Correlation,", 0) == 0) {
      out << eval.model_id << ',' << line << '\n';
    }
  }
}

int cmd_ingest(const FlagValues& flags, const std::string& synthesize,
               int days, std::ostream& out) {
  nlohmann::ordered_json summary;
  if (!synthesize.empty()) {
    synth::SynthConfig config;
    config.kind = synth::kind_from_string(synthesize);
    if (days < 1) {
      throw ConfigError("ingest: --days must be >= 1, got " +
                        std::to_string(days));
    }
    config.days = static_cast<std::size_t>(days);
    if (flags.seed) config.seed = *flags.seed;
    std::vector<dataio::OhlcvRecord> records = synth::generate_ohlcv(config);

    fs::path dir = ensure_output_dir(flags.output_dir.value_or("."));
    fs::path csv_path =
        dir / (synthesize + "_" + std::to_string(days) + "d.csv");
    write_text_file(csv_path, dataio::write_ohlcv_csv(records));

    summary["kind"] = synthesize;
    summary["days"] = days;
    summary["seed"] = flags.seed.value_or(config.seed);
    summary["records"] = records.size();
    summary["path"] = csv_path.string();
  } else {
    if (!flags.data_path) {
      throw ConfigError("ingest: pass --data <csv> or --synthesize <kind>");
    }
    dataio::ParseResult parsed =
        dataio::parse_ohlcv_csv(read_text_file(*flags.data_path));
    summary["rows_read"] = parsed.rows_read;
    summary["rows_dropped_null"] = parsed.rows_dropped_null;
    summary["records"] = parsed.records.size();
    if (!parsed.records.empty()) {
      summary["first_date"] = parsed.records.front().date.iso();
      summary["last_date"] = parsed.records.back().date.iso();
    }
  }
  out << summary.dump(2) << '\n';
  return 0;
}

int cmd_backtest(const RunConfig& config, std::ostream& out) {
  dataio::DatasetSplit split = load_split(config);
  fs::path dir = ensure_output_dir(config.output_dir);
  const std::string digest = config_digest(config);
  const int threads = static_cast<int>(resolve_threads(config.rounds));

  if (is_lstm_model(config.model)) {
    lstm::LstmArchitecture arch =
        lstm::make_architecture(lstm::arch_from_string(config.model));
    lstm::TrainingConfig base = lstm_config(config);
    auto task = [&](std::uint64_t seed) {
      lstm::TrainingConfig training = base;
      training.seed = seed;
      return backtest::walk_forward(arch, split, training,
                                    config.retrain_each_week);
    };
    std::vector<backtest::RunResult> results =
        backtest::run_rounds(task, config.rounds, config.seed, threads);
    if (!config.emit_timing) scrub_times(results);
    emit_report(report::build_report(config.model, digest, results,
                                     backtest::mean_open(split.test)),
                dir, out);
    return 0;
  }

  models::ModelSpec base = classic_spec(config);
  const std::string id = models::family_name(base.family);
  const int lag = config.paper_mode ? 0 : config.lag;
  std::vector<backtest::RunResult> train_results;
  std::vector<backtest::RunResult> test_results;
  train_results.reserve(static_cast<std::size_t>(config.rounds));
  test_results.reserve(static_cast<std::size_t>(config.rounds));
  for (int round = 0; round < config.rounds; ++round) {
    models::ModelSpec spec = base;
    spec.seed = config.seed + static_cast<std::uint64_t>(round);
    backtest::ClassicEval eval = backtest::evaluate_classic(spec, split, lag);
    train_results.push_back(std::move(eval.train_result));
    test_results.push_back(std::move(eval.test_result));
  }
  if (!config.emit_timing) {
    scrub_times(train_results);
    scrub_times(test_results);
  }
  emit_report(report::build_report(id + "_case1", digest, train_results,
                                   backtest::mean_open(split.train)),
              dir, out);
  emit_report(report::build_report(id + "_case2", digest, test_results,
                                   backtest::mean_open(split.test)),
              dir, out);
  return 0;
}

int cmd_gridsearch(const RunConfig& config, std::ostream& out) {
  if (config.grid.axes.empty()) {
    throw ConfigError("gridsearch: config has no [grid] section");
  }
  dataio::DatasetSplit split = load_split(config);
  fs::path dir = ensure_output_dir(config.output_dir);

  backtest::GridResult result;
  std::string id;
  if (is_lstm_model(config.model)) {
    result = backtest::grid_search(lstm::arch_from_string(config.model),
                                   lstm_config(config), config.grid, split);
    id = config.model;
  } else {
    result = backtest::grid_search(classic_spec(config), config.grid, split,
                                   config.paper_mode ? 0 : config.lag);
    id = models::family_name(models::family_from_string(config.model));
  }

  auto number = [](double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf);
  };

  std::ostringstream trace;
  for (const auto& axis : config.grid.axes) trace << axis.first << ',';
  trace << "score\n";
  for (const backtest::GridPoint& point : result.trace) {
    for (const auto& axis : config.grid.axes) {
      trace << number(point.values.at(axis.first)) << ',';
    }
    trace << number(point.score) << '\n';
  }
  write_text_file(dir / (id + "_grid_trace.csv"), trace.str());

  nlohmann::ordered_json best;
  best["model"] = id;
  best["score"] = result.best.score;
  nlohmann::ordered_json params;
  for (const auto& axis : config.grid.axes) {
    params[axis.first] = result.best.values.at(axis.first);
  }
  best["params"] = params;
  write_text_file(dir / (id + "_grid_best.json"), best.dump(2) + "\n");

  out << id << ",best";
  for (const auto& axis : config.grid.axes) {
    out << ',' << axis.first << '=' << number(result.best.values.at(axis.first));
  }
  out << ",score=" << number(result.best.score) << '\n';
  return 0;
}

int cmd_report(const std::string& report_path,
               const std::optional<std::string>& out_dir, std::ostream& out) {
  fs::path input(report_path);
  report::EvalReport eval = report::parse_report(read_text_file(input));

  std::string base = input.filename().string();
  if (base.size() > 5 && base.ends_with(".json")) {
    base.resize(base.size() - 5);
  }
  fs::path dir = out_dir ? ensure_output_dir(*out_dir)
                         : (input.has_parent_path() ? input.parent_path()
                                                    : fs::path("."));
  fs::path csv_path = dir / (base + ".csv");
  fs::path svg_path = dir / (base + ".svg");
  write_text_file(csv_path, report::render_csv(eval));
  write_text_file(svg_path, report::render_svg(eval));
  out << "wrote " << csv_path.string() << '\n';
  out << "wrote " << svg_path.string() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"walk-forward stock forecasting workbench"};
  app.name("walkcast");
  app.require_subcommand(1);

  FlagValues flags;
  std::string synthesize;
  int days = 300;
  std::string report_path;
  std::optional<std::string> report_out;

  CLI::App* ingest = app.add_subcommand("ingest", "parse or synthesize OHLCV data");
  ingest->add_option("--data", flags.data_path, "OHLCV CSV to parse");
  ingest->add_option("--synthesize", synthesize, "sine|trend|noise")
      ->check(CLI::IsMember({"sine", "trend", "noise"}));
  ingest->add_option("--days", days, "synthetic series length in trading days");
  ingest->add_option("--seed", flags.seed, "synthetic noise seed");
  ingest->add_option("--out", flags.output_dir, "directory for synthesized CSV");

  CLI::App* backtest_cmd =
      app.add_subcommand("backtest", "train and evaluate one model");
  add_run_flags(backtest_cmd, flags);

  CLI::App* gridsearch =
      app.add_subcommand("gridsearch", "sweep the [grid] section of the config");
  add_run_flags(gridsearch, flags);

  CLI::App* report_cmd =
      app.add_subcommand("report", "re-render CSV/SVG from a stored report");
  report_cmd->add_option("json", report_path, "report JSON path")->required();
  report_cmd->add_option("--out", report_out, "output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (ingest->parsed()) {
      return cmd_ingest(flags, synthesize, days, out);
    }
    if (backtest_cmd->parsed()) {
      return cmd_backtest(resolve_config(flags), out);
    }
    if (gridsearch->parsed()) {
      return cmd_gridsearch(resolve_config(flags), out);
    }
    return cmd_report(report_path, report_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case Error::Kind::divergence:
        return 3;
      case Error::Kind::io:
        return 4;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace walkcast::cli
