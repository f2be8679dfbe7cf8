// sentinel: continuous implicit-authentication engine for multi-sensor
// time series. Subcommands: gen, train, eval, sweep, monitor, validate.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sentinel/authenticator.hpp"
#include "sentinel/core.hpp"
#include "sentinel/evaluation.hpp"
#include "sentinel/ingest.hpp"
#include "sentinel/resample.hpp"
#include "sentinel/svm.hpp"
#include "sentinel/syngen.hpp"

namespace fs = std::filesystem;
using namespace sentinel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

/// Usage / configuration mistakes: bad flags, missing inputs, unknown ids.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string today_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[16];
  std::strftime(buf, sizeof(buf), "%Y-%m-%d", &tm);
  return buf;
}

fs::path require_file(const std::string& path, const char* what) {
  fs::path p(path);
  if (!fs::exists(p))
    throw config_error(std::string(what) + " not found: " + p.string());
  return p;
}

std::map<std::string, Trace> load_dataset_checked(const std::string& manifest_path) {
  const fs::path p = require_file(manifest_path, "manifest");
  return load_dataset(load_manifest(p));
}

std::vector<SensorSet> parse_sensor_sets(const std::vector<std::string>& specs) {
  if (specs.empty()) return SensorSet::all_combinations();
  std::vector<SensorSet> sets;
  for (const std::string& s : specs) sets.push_back(SensorSet::parse(s));
  return sets;
}

struct GenArgs {
  std::string scenario_path;
  std::string out_dir;
  std::size_t users = 0;
  double separation = 3.0;
  double duration_s = 14400.0;
  double rate_hz = 5.0;
  double ori_variability = 3.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int cmd_gen(const GenArgs& args) {
  ScenarioSpec spec;
  if (!args.scenario_path.empty()) {
    spec = load_scenario(require_file(args.scenario_path, "scenario file"));
    if (args.seed_given) spec.seed = args.seed;
  } else if (args.users >= 2) {
    spec = make_separated_scenario(args.users, args.separation, args.duration_s, args.rate_hz,
                                   args.seed_given ? args.seed : 1, args.ori_variability);
  } else {
    throw config_error("gen: pass --scenario FILE or --users N (N >= 2)");
  }

  const fs::path out(args.out_dir);
  fs::create_directories(out);

  const auto population = generate_population(spec);
  DatasetManifest manifest;
  manifest.root = out;
  manifest.native_rate_hz = spec.native_rate_hz;
  for (const auto& [id, trace] : population) {
    const std::string file = id + ".csv";
    save_trace(trace, out / file);
    manifest.users.push_back({id, file});
  }
  save_manifest(manifest, out / "manifest.json");
  save_scenario(spec, out / "scenario_used.json");
  if (!spec.takeovers.empty()) save_trace(generate_takeover_stream(spec), out / "stream.csv");

  std::cout << "wrote " << population.size() << " traces + manifest.json to " << out.string()
            << " (seed " << spec.seed << ")\n";
  return kExitOk;
}

struct TrainArgs {
  std::string manifest_path;
  std::string owner;
  std::string sensors = "acc,ori,mag";
  double interval_s = 20.0;
  double lambda = 1e-2;
  double detection_window_s = 20.0;
  std::uint64_t seed = 1;
  std::size_t epochs = 200;
  bool majority_vote = false;
  std::string trained_at;
  std::string out_path;
};

int cmd_train(const TrainArgs& args) {
  const auto dataset = load_dataset_checked(args.manifest_path);
  auto owner_it = dataset.find(args.owner);
  if (owner_it == dataset.end())
    throw config_error("unknown owner id '" + args.owner + "'");

  std::map<std::string, Trace> others;
  for (const auto& [id, trace] : dataset)
    if (id != args.owner) others.emplace(id, trace);

  BuildOptions options;
  options.detection_window_s = args.detection_window_s;
  options.majority_vote = args.majority_vote;
  options.trained_at = args.trained_at.empty() ? today_utc() : args.trained_at;
  options.solver.epochs = args.epochs;

  const Profile profile =
      build_profile(owner_it->second, others, SensorSet::parse(args.sensors),
                    ResampleSpec{args.interval_s}, args.lambda, args.seed, options);
  save_profile(profile, args.out_path);
  if (profile.negatives_with_replacement)
    std::cerr << "warning: negatives pool smaller than owner set, sampled with replacement\n";
  std::cout << "wrote profile for '" << profile.owner_id << "' ("
            << profile.sensors.to_string() << ", " << profile.resample.interval_s
            << " s interval) to " << args.out_path << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string manifest_path;
  std::string owner;
  std::vector<std::string> sensor_sets;
  std::vector<double> intervals;
  std::vector<double> sizes_days{0.0};
  std::string mode = "paper-literal";
  int k = 10;
  double lambda = 1e-2;
  std::uint64_t seed = 1;
  int repetitions = 1;
  std::size_t epochs = 200;
  bool no_timing = false;
  std::string format = "csv";
  std::string out_path;
  std::string plot_dir;
  bool timing_curve_flag = false;
  std::vector<double> timing_intervals{1, 2, 5, 10, 20};
  int jobs = 1;
};

EvalConfig make_eval_config(const EvalArgs& args) {
  EvalConfig config;
  config.k = args.k;
  config.mode = cv_mode_from_string(args.mode);
  if (!args.intervals.empty()) config.intervals_s = args.intervals;
  config.sensor_sets = parse_sensor_sets(args.sensor_sets);
  config.data_sizes_days = args.sizes_days;
  config.lambda = args.lambda;
  config.seed = args.seed;
  config.repetitions = args.repetitions;
  config.solver.epochs = args.epochs;
  config.measure_time = !args.no_timing;
  return config;
}

void emit_report(const EvalReport& report, const std::string& format,
                 const std::string& out_path) {
  std::string text;
  if (format == "csv")
    text = report_to_csv(report);
  else if (format == "json")
    text = report_to_json_text(report);
  else
    throw config_error("unknown format '" + format + "' (expected csv or json)");
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw error("cannot write " + out_path);
    out << text;
    std::cout << "wrote report to " << out_path << "\n";
  }
}

std::vector<std::string> owners_for(const std::map<std::string, Trace>& dataset,
                                    const std::string& owner_flag) {
  if (owner_flag != "all") {
    if (dataset.find(owner_flag) == dataset.end())
      throw config_error("unknown owner id '" + owner_flag + "'");
    return {owner_flag};
  }
  std::vector<std::string> owners;
  for (const auto& [id, trace] : dataset) owners.push_back(id);
  return owners;
}

/// Per-owner records plus a mean row per cell (owner column "mean").
EvalReport merge_owner_reports(const std::vector<EvalReport>& reports) {
  EvalReport merged;
  merged.owner = "all";
  merged.config = reports.front().config;
  for (const EvalReport& r : reports)
    for (CellRecord c : r.cells) {
      c.sensor_set = r.owner + ":" + c.sensor_set;
      merged.cells.push_back(std::move(c));
    }
  const std::size_t cells_per_owner = reports.front().cells.size();
  for (std::size_t i = 0; i < cells_per_owner; ++i) {
    CellRecord mean = reports.front().cells[i];
    mean.sensor_set = "mean:" + mean.sensor_set;
    mean.accuracy = mean.fp_rate = mean.fn_rate = mean.train_time_s = 0.0;
    for (const EvalReport& r : reports) {
      mean.accuracy += r.cells[i].accuracy;
      mean.fp_rate += r.cells[i].fp_rate;
      mean.fn_rate += r.cells[i].fn_rate;
      mean.train_time_s += r.cells[i].train_time_s;
    }
    const double n = static_cast<double>(reports.size());
    mean.accuracy /= n;
    mean.fp_rate /= n;
    mean.fn_rate /= n;
    mean.train_time_s /= n;
    merged.cells.push_back(std::move(mean));
  }
  return merged;
}

int cmd_sweep(const EvalArgs& args, bool single_cell) {
  const auto dataset = load_dataset_checked(args.manifest_path);
  EvalConfig config = make_eval_config(args);
  if (single_cell) {
    if (config.sensor_sets.size() != 1 || config.intervals_s.size() != 1 ||
        config.data_sizes_days.size() != 1)
      throw config_error("eval: pass exactly one --sensors, one --interval and one --size");
  }

  const std::vector<std::string> owners = owners_for(dataset, args.owner);
  std::vector<EvalReport> reports;
  for (const std::string& owner : owners)
    reports.push_back(sweep(dataset, owner, config, args.jobs));
  const EvalReport report = reports.size() == 1 ? reports.front() : merge_owner_reports(reports);

  emit_report(report, args.format, args.out_path);
  if (!args.plot_dir.empty()) {
    for (const std::string& f : write_plot_series(report, args.plot_dir))
      std::cout << "wrote series " << (fs::path(args.plot_dir) / f).string() << "\n";
  }
  if (args.timing_curve_flag) {
    // wall-clock honesty: the curve always runs serially
    const auto curve = timing_curve(dataset, owners.front(), args.timing_intervals, config);
    bool non_increasing = true;
    for (std::size_t i = 1; i < curve.size(); ++i)
      if (curve[i].train_time_s > curve[i - 1].train_time_s) non_increasing = false;
    std::string text = "# sentinel timing curve (median of 3, warm-up discarded)\n";
    text += "# owner=" + owners.front() + "\n";
    text += "# non_increasing_train_time=" + std::string(non_increasing ? "true" : "false") +
            "\n";
    text += "# reference (PU dataset, reported, not asserted): 33502 s at 1 s, 170.72 s at 5 s, "
            "6.07 s at 20 s\n";
    text += "interval_s,n_train,train_time_s\n";
    for (const TimingRecord& r : curve) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%g,%zu,%.6f\n", r.interval_s, r.n_train, r.train_time_s);
      text += buf;
    }
    const fs::path out = args.out_path.empty() ? fs::path("timing_curve.csv")
                                               : fs::path(args.out_path + ".timing.csv");
    std::ofstream f(out, std::ios::binary);
    if (!f) throw error("cannot write " + out.string());
    f << text;
    std::cout << "wrote timing curve to " << out.string() << "\n";
  }
  return kExitOk;
}

struct MonitorArgs {
  std::string profile_path;
};

int cmd_monitor(const MonitorArgs& args) {
  const Profile profile = load_profile(require_file(args.profile_path, "profile"));
  std::cerr << "monitoring for owner '" << profile.owner_id << "' ("
            << profile.sensors.to_string() << ", window " << profile.detection_window_s
            << " s, seed " << profile.seed << ")\n";
  StreamMonitor monitor(profile);

  std::string line;
  std::size_t line_no = 0;
  std::size_t dropped_seen = 0;
  while (std::getline(std::cin, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == kTraceCsvHeader) continue;
    Trace row;
    try {
      row = parse_trace(std::string(kTraceCsvHeader) + "\n" + line + "\n", "stream", 1e9);
    } catch (const std::exception& e) {
      std::cerr << "warning: stdin line " << line_no << ": malformed row, skipped\n";
      continue;
    }
    if (row.samples.empty()) continue;
    if (auto verdict = monitor.push(row.samples.front()))
      std::cout << verdict_to_json_line(*verdict) << "\n";
    if (monitor.dropped() != dropped_seen) {
      dropped_seen = monitor.dropped();
      std::cerr << "warning: stdin line " << line_no << ": out-of-order sample dropped\n";
    }
  }
  if (auto verdict = monitor.finish()) std::cout << verdict_to_json_line(*verdict) << "\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string manifest_path;
  std::string profile_path;
};

int cmd_validate(const ValidateArgs& args) {
  if (args.manifest_path.empty() && args.profile_path.empty())
    throw config_error("validate: pass --manifest and/or --profile");
  if (!args.manifest_path.empty()) {
    const auto dataset = load_dataset_checked(args.manifest_path);
    std::size_t total = 0;
    for (const auto& [id, trace] : dataset) total += trace.samples.size();
    std::cout << "manifest ok: " << dataset.size() << " users, " << total << " samples\n";
  }
  if (!args.profile_path.empty()) {
    const Profile p = load_profile(require_file(args.profile_path, "profile"));
    std::cout << "profile ok: owner '" << p.owner_id << "', " << p.sensors.to_string()
              << ", dim " << p.model.w.size() << ", interval " << p.resample.interval_s
              << " s\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sentinel: continuous implicit authentication over smartphone sensor streams"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic multi-user dataset");
  gen_cmd->add_option("--scenario", gen.scenario_path, "scenario JSON file");
  gen_cmd->add_option("--users", gen.users, "build a separated population of N users");
  gen_cmd->add_option("--separation", gen.separation, "pairwise baseline separation")
      ->capture_default_str();
  gen_cmd->add_option("--duration", gen.duration_s, "trace length in seconds")
      ->capture_default_str();
  gen_cmd->add_option("--rate", gen.rate_hz, "native sampling rate in Hz")->capture_default_str();
  gen_cmd->add_option("--ori-variability", gen.ori_variability, "orientation noise multiplier")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "master seed")
      ->envname("SENTINEL_SEED")
      ->each([&gen](const std::string&) { gen.seed_given = true; });
  gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train an owner profile");
  train_cmd->add_option("--manifest", train_args.manifest_path, "dataset manifest")->required();
  train_cmd->add_option("--owner", train_args.owner, "owner user id")->required();
  train_cmd->add_option("--sensors", train_args.sensors, "sensor subset, e.g. acc,mag")
      ->capture_default_str();
  train_cmd->add_option("--interval", train_args.interval_s, "resample interval in seconds")
      ->capture_default_str();
  train_cmd->add_option("--lambda", train_args.lambda, "regularization weight")
      ->capture_default_str();
  train_cmd->add_option("--window", train_args.detection_window_s, "detection window in seconds")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.seed, "seed")->envname("SENTINEL_SEED");
  train_cmd->add_option("--epochs", train_args.epochs, "solver epochs")->capture_default_str();
  train_cmd->add_flag("--majority-vote", train_args.majority_vote,
                      "decide by per-vector majority instead of mean score");
  train_cmd->add_option("--trained-at", train_args.trained_at,
                        "training date stamp (default: today UTC)");
  train_cmd->add_option("--out", train_args.out_path, "profile output file")->required();

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "cross-validate a single cell");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a sensor-set x interval x size grid");
  for (CLI::App* cmd : {eval_cmd, sweep_cmd}) {
    cmd->add_option("--manifest", eval_args.manifest_path, "dataset manifest")->required();
    cmd->add_option("--owner", eval_args.owner, "owner user id, or 'all'")->required();
    cmd->add_option("--sensors", eval_args.sensor_sets,
                    "sensor set (repeatable); default: all 7 combinations");
    cmd->add_option("--interval", eval_args.intervals, "resample interval(s) in seconds")
        ->delimiter(',');
    cmd->add_option("--size", eval_args.sizes_days, "training data size(s) in days; 0 = full")
        ->delimiter(',');
    cmd->add_option("--mode", eval_args.mode, "cv mode: paper-literal or standard")
        ->capture_default_str();
    cmd->add_option("--k", eval_args.k, "number of folds")->capture_default_str();
    cmd->add_option("--lambda", eval_args.lambda, "regularization weight")
        ->capture_default_str();
    cmd->add_option("--seed", eval_args.seed, "seed")->envname("SENTINEL_SEED");
    cmd->add_option("--repetitions", eval_args.repetitions,
                    "derived-seed repetitions averaged per cell")
        ->capture_default_str();
    cmd->add_option("--epochs", eval_args.epochs, "solver epochs")->capture_default_str();
    cmd->add_flag("--no-timing", eval_args.no_timing,
                  "report train_time_s as 0 for byte-reproducible reports");
    cmd->add_option("--format", eval_args.format, "csv or json")->capture_default_str();
    cmd->add_option("--out", eval_args.out_path, "report file (default: stdout)");
    cmd->add_option("--plot-data", eval_args.plot_dir, "emit per-figure series files here");
  }
  sweep_cmd->add_flag("--timing-curve", eval_args.timing_curve_flag,
                      "also measure a serial training-time curve");
  sweep_cmd->add_option("--timing-intervals", eval_args.timing_intervals,
                        "intervals for --timing-curve")
      ->delimiter(',');
  sweep_cmd->add_option("--jobs", eval_args.jobs, "parallel cell workers")
      ->capture_default_str();

  MonitorArgs monitor_args;
  CLI::App* monitor_cmd =
      app.add_subcommand("monitor", "score trace CSV rows from stdin, one verdict per window");
  monitor_cmd->add_option("--profile", monitor_args.profile_path, "profile JSON")->required();

  ValidateArgs validate_args;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a manifest and/or profile");
  validate_cmd->add_option("--manifest", validate_args.manifest_path, "dataset manifest");
  validate_cmd->add_option("--profile", validate_args.profile_path, "profile JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (eval_cmd->parsed()) return cmd_sweep(eval_args, true);
    if (sweep_cmd->parsed()) return cmd_sweep(eval_args, false);
    if (monitor_cmd->parsed()) return cmd_monitor(monitor_args);
    if (validate_cmd->parsed()) return cmd_validate(validate_args);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
