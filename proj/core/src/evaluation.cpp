#include "sentinel/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "sentinel/authenticator.hpp"
#include "sentinel/resample.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

namespace {

constexpr std::uint64_t kPosFoldTag = 0x504f53;
constexpr std::uint64_t kNegFoldTag = 0x4e4547;
constexpr std::uint64_t kRotationTag = 0x524f54;

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::uint64_t cell_seed(std::uint64_t base, const SensorSet& s, double interval, double days) {
  const std::uint64_t bits = (s.acc() ? 1u : 0u) | (s.ori() ? 2u : 0u) | (s.mag() ? 4u : 0u);
  std::uint64_t h = Rng::mix(base, bits);
  h = Rng::mix(h, std::bit_cast<std::uint64_t>(interval));
  return Rng::mix(h, std::bit_cast<std::uint64_t>(days));
}

struct CellData {
  std::vector<FeatureVector> owner_vectors;
  std::vector<FeatureVector> pool;
  std::vector<std::string> pool_sources;
};

CellData prepare_cell(const std::map<std::string, Trace>& dataset, const std::string& owner,
                      const SensorSet& sensors, double interval_s, double data_size_days) {
  auto it = dataset.find(owner);
  if (it == dataset.end()) throw error("unknown owner '" + owner + "'");

  const ResampleSpec spec{interval_s};
  CellData cell;
  for (const auto& [id, trace] : dataset) {
    const Trace* source = &trace;
    Trace truncated;
    if (data_size_days > 0.0) {
      truncated = truncate_trace(trace, data_size_days * 86400.0);
      if (truncated.samples.empty())
        throw error("user '" + id + "' has no data within " +
                    std::to_string(data_size_days) + " days");
      source = &truncated;
    }
    if (id == owner) {
      cell.owner_vectors = extract_features(*source, spec, sensors);
    } else {
      for (FeatureVector& f : extract_features(*source, spec, sensors)) {
        cell.pool.push_back(std::move(f));
        cell.pool_sources.push_back(id);
      }
    }
  }
  if (cell.pool.empty()) throw error("negatives pool is empty");
  return cell;
}

struct Metrics {
  double accuracy = 0, fp_rate = 0, fn_rate = 0, train_time_s = 0;
  std::size_t n_train = 0, n_test = 0;
};

Metrics run_cell_once(const CellData& cell, const EvalConfig& config, std::uint64_t seed) {
  const std::size_t n = cell.owner_vectors.size();
  if (n < static_cast<std::size_t>(config.k))
    throw error("insufficient data for " + std::to_string(config.k) + " folds: owner has " +
                std::to_string(n) + " feature vectors");

  // Balanced labeled set: positives occupy [0, n), negatives [n, 2n).
  std::vector<FeatureVector> labeled = build_training_set(
      cell.owner_vectors, cell.pool, cell.pool_sources, seed, nullptr, nullptr);

  const auto folds_pos = kfold_split(n, config.k, Rng::mix(seed, kPosFoldTag));
  const auto folds_neg = kfold_split(n, config.k, Rng::mix(seed, kNegFoldTag));

  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  double time_sum = 0.0;
  Metrics m;

  for (int r = 0; r < config.k; ++r) {
    std::vector<std::size_t> train_idx, test_idx;
    for (int f = 0; f < config.k; ++f) {
      const bool in_train = (config.mode == CvMode::kLiteralOneFold) ? (f == r) : (f != r);
      auto& dst = in_train ? train_idx : test_idx;
      for (std::size_t i : folds_pos[static_cast<std::size_t>(f)]) dst.push_back(i);
      for (std::size_t i : folds_neg[static_cast<std::size_t>(f)]) dst.push_back(i + n);
    }

    std::vector<FeatureVector> train_set;
    train_set.reserve(train_idx.size());
    for (std::size_t i : train_idx) train_set.push_back(labeled[i]);

    const Scaler scaler = fit_scaler(train_set);
    train_set = apply_scaler(scaler, std::move(train_set));

    SolverConfig solver = config.solver;
    solver.seed = Rng::mix(seed, kRotationTag + static_cast<std::uint64_t>(r));

    const auto start = std::chrono::steady_clock::now();
    const LinearModel model = train(train_set, config.lambda, solver);
    const auto stop = std::chrono::steady_clock::now();
    if (config.measure_time)
      time_sum += std::chrono::duration<double>(stop - start).count();

    for (std::size_t i : test_idx) {
      const FeatureVector scaled = apply_scaler(scaler, labeled[i]);
      const Prediction p = predict(model, scaled.values);
      const int y = *labeled[i].label;
      if (y > 0)
        (p.label > 0 ? tp : fn)++;
      else
        (p.label > 0 ? fp : tn)++;
    }
    if (r == 0) {
      m.n_train = train_idx.size();
      m.n_test = test_idx.size();
    }
  }

  const double total = static_cast<double>(tp + tn + fp + fn);
  m.accuracy = static_cast<double>(tp + tn) / total;
  m.fp_rate = static_cast<double>(fp) / static_cast<double>(fp + tn);
  m.fn_rate = static_cast<double>(fn) / static_cast<double>(fn + tp);
  m.train_time_s = time_sum / static_cast<double>(config.k);
  return m;
}

std::string csv_cell_row(const CellRecord& c) {
  std::string row = c.sensor_set;
  row += ',' + fmt("%g", c.interval_s);
  row += ',' + fmt("%g", c.data_size_days);
  row += ',' + fmt("%.6f", c.accuracy);
  row += ',' + fmt("%.6f", c.fp_rate);
  row += ',' + fmt("%.6f", c.fn_rate);
  row += ',' + fmt("%.6f", c.train_time_s);
  row += ',' + std::to_string(c.n_train);
  row += ',' + std::to_string(c.n_test);
  row += ',' + std::to_string(c.seed);
  return row;
}

std::string joined_doubles(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ',';
    out += fmt("%g", v);
  }
  return out;
}

std::string joined_sets(const std::vector<SensorSet>& sets) {
  std::string out;
  for (const SensorSet& s : sets) {
    if (!out.empty()) out += '|';
    out += s.to_string();
  }
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw error("cannot write file: " + file.string());
  out << text;
}

}  // namespace

const char* to_string(CvMode m) {
  return m == CvMode::kLiteralOneFold ? "paper-literal" : "standard";
}

CvMode cv_mode_from_string(const std::string& s) {
  if (s == "paper-literal") return CvMode::kLiteralOneFold;
  if (s == "standard") return CvMode::kStandard;
  throw error("unknown cv mode '" + s + "' (expected 'paper-literal' or 'standard')");
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw error("kfold_split: k must be >= 2");
  if (n < static_cast<std::size_t>(k))
    throw error("kfold_split: n (" + std::to_string(n) + ") < k (" + std::to_string(k) + ")");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);

  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i)
    folds[i % static_cast<std::size_t>(k)].push_back(idx[i]);
  return folds;
}

CellRecord evaluate_cell(const std::map<std::string, Trace>& dataset, const std::string& owner,
                         const SensorSet& sensors, double interval_s, double data_size_days,
                         const EvalConfig& config) {
  if (config.repetitions < 1) throw error("evaluate_cell: repetitions must be >= 1");
  const CellData cell = prepare_cell(dataset, owner, sensors, interval_s, data_size_days);
  const std::uint64_t seed = cell_seed(config.seed, sensors, interval_s, data_size_days);

  CellRecord record;
  record.sensor_set = sensors.to_string();
  record.interval_s = interval_s;
  record.data_size_days = data_size_days;
  record.seed = seed;

  for (int rep = 0; rep < config.repetitions; ++rep) {
    const std::uint64_t rep_seed =
        rep == 0 ? seed : Rng::mix(seed, static_cast<std::uint64_t>(rep));
    const Metrics m = run_cell_once(cell, config, rep_seed);
    record.accuracy += m.accuracy;
    record.fp_rate += m.fp_rate;
    record.fn_rate += m.fn_rate;
    record.train_time_s += m.train_time_s;
    if (rep == 0) {
      record.n_train = m.n_train;
      record.n_test = m.n_test;
    }
  }
  const double reps = static_cast<double>(config.repetitions);
  record.accuracy /= reps;
  record.fp_rate /= reps;
  record.fn_rate /= reps;
  record.train_time_s /= reps;
  return record;
}

EvalReport sweep(const std::map<std::string, Trace>& dataset, const std::string& owner,
                 const EvalConfig& config, int jobs) {
  if (config.sensor_sets.empty() || config.intervals_s.empty() || config.data_sizes_days.empty())
    throw error("sweep: sensor_sets, intervals_s and data_sizes_days must be non-empty");
  if (config.k < 2) throw error("sweep: k must be >= 2");
  if (jobs < 1) jobs = 1;

  struct Coord {
    SensorSet sensors = SensorSet::all();
    double interval = 0, days = 0;
  };
  std::vector<Coord> coords;
  for (const SensorSet& s : config.sensor_sets)
    for (double interval : config.intervals_s)
      for (double days : config.data_sizes_days) coords.push_back({s, interval, days});

  EvalReport report;
  report.owner = owner;
  report.config = config;
  report.cells.resize(coords.size());

  std::vector<std::string> errors(coords.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= coords.size()) return;
      const Coord& c = coords[i];
      try {
        report.cells[i] = evaluate_cell(dataset, owner, c.sensors, c.interval, c.days, config);
      } catch (const std::exception& e) {
        errors[i] = "cell (" + c.sensors.to_string() + ", " + fmt("%g", c.interval) + " s, " +
                    fmt("%g", c.days) + " d): " + e.what();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    const int n_threads = std::min<int>(jobs, static_cast<int>(coords.size()));
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  for (const std::string& e : errors)
    if (!e.empty()) throw error(e);
  return report;
}

std::vector<TimingRecord> timing_curve(const std::map<std::string, Trace>& dataset,
                                       const std::string& owner,
                                       const std::vector<double>& intervals_s,
                                       const EvalConfig& config) {
  if (intervals_s.empty()) throw error("timing_curve: no intervals");
  const SensorSet sensors = SensorSet::all();

  std::vector<TimingRecord> records;
  for (double interval : intervals_s) {
    const CellData cell = prepare_cell(dataset, owner, sensors, interval, 0.0);
    const std::uint64_t seed = cell_seed(config.seed, sensors, interval, 0.0);

    std::vector<FeatureVector> labeled = build_training_set(
        cell.owner_vectors, cell.pool, cell.pool_sources, seed, nullptr, nullptr);
    const Scaler scaler = fit_scaler(labeled);
    labeled = apply_scaler(scaler, std::move(labeled));

    SolverConfig solver = config.solver;
    solver.seed = Rng::mix(seed, kRotationTag);

    std::array<double, 3> runs{};
    train(labeled, config.lambda, solver);  // warm-up, discarded
    for (double& r : runs) {
      const auto start = std::chrono::steady_clock::now();
      train(labeled, config.lambda, solver);
      r = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    std::sort(runs.begin(), runs.end());

    TimingRecord rec;
    rec.interval_s = interval;
    rec.n_train = labeled.size();
    rec.train_time_s = runs[1];
    records.push_back(rec);
  }
  return records;
}

std::vector<CellRecord> data_size_curve(const std::map<std::string, Trace>& dataset,
                                        const std::string& owner, const std::vector<double>& days,
                                        const SensorSet& sensors, double interval_s,
                                        const EvalConfig& config) {
  if (days.empty()) throw error("data_size_curve: no sizes");
  auto it = dataset.find(owner);
  if (it == dataset.end()) throw error("unknown owner '" + owner + "'");
  // a trace covering exactly N days ends one sample spacing short of N*86400
  const double spacing = 1.0 / it->second.native_rate_hz;
  for (double d : days) {
    if (!(d > 0.0)) throw error("data_size_curve: size must be positive days, got " + fmt("%g", d));
    if (it->second.duration_s() + spacing < d * 86400.0 - 1e-6)
      throw error("data_size_curve: insufficient trace length for " + fmt("%g", d) +
                  " days (owner spans " + fmt("%g", it->second.duration_s()) + " s)");
  }

  std::vector<CellRecord> records;
  for (double d : days)
    records.push_back(evaluate_cell(dataset, owner, sensors, interval_s, d, config));
  return records;
}

std::string report_to_csv(const EvalReport& report) {
  const EvalConfig& c = report.config;
  std::string out;
  out += "# sentinel evaluation report\n";
  out += "# owner=" + report.owner + "\n";
  out += "# mode=" + std::string(to_string(c.mode)) + "\n";
  out += "# k=" + std::to_string(c.k) + "\n";
  out += "# lambda=" + fmt("%g", c.lambda) + "\n";
  out += "# seed=" + std::to_string(c.seed) + "\n";
  out += "# repetitions=" + std::to_string(c.repetitions) + "\n";
  out += "# epochs=" + std::to_string(c.solver.epochs) + "\n";
  out += "# measure_time=" + std::string(c.measure_time ? "1" : "0") + "\n";
  out += "# sensor_sets=" + joined_sets(c.sensor_sets) + "\n";
  out += "# intervals_s=" + joined_doubles(c.intervals_s) + "\n";
  out += "# data_sizes_days=" + joined_doubles(c.data_sizes_days) + "\n";
  out += "# cells=" + std::to_string(report.cells.size()) + "\n";
  out += "# reference (PU dataset, reported, not asserted): acc+ori+mag accuracy 93.9% at 5 s, "
         "90.1% at 20 s; training time 33502 s at 1 s, 6.07 s at 20 s, 0.51 s at 60 s\n";
  out += "sensor_set,interval_s,data_size_days,accuracy,fp_rate,fn_rate,train_time_s,"
         "n_train,n_test,seed\n";
  for (const CellRecord& cell : report.cells) out += csv_cell_row(cell) + "\n";
  return out;
}

std::string report_to_json_text(const EvalReport& report) {
  const EvalConfig& c = report.config;
  nlohmann::json j;
  j["owner"] = report.owner;
  j["config"] = {{"mode", to_string(c.mode)},
                 {"k", c.k},
                 {"lambda", c.lambda},
                 {"seed", c.seed},
                 {"repetitions", c.repetitions},
                 {"epochs", c.solver.epochs},
                 {"measure_time", c.measure_time},
                 {"sensor_sets", joined_sets(c.sensor_sets)},
                 {"intervals_s", c.intervals_s},
                 {"data_sizes_days", c.data_sizes_days}};
  j["cells"] = nlohmann::json::array();
  for (const CellRecord& cell : report.cells) {
    j["cells"].push_back({{"sensor_set", cell.sensor_set},
                          {"interval_s", cell.interval_s},
                          {"data_size_days", cell.data_size_days},
                          {"accuracy", cell.accuracy},
                          {"fp_rate", cell.fp_rate},
                          {"fn_rate", cell.fn_rate},
                          {"train_time_s", cell.train_time_s},
                          {"n_train", cell.n_train},
                          {"n_test", cell.n_test},
                          {"seed", cell.seed}});
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> write_plot_series(const EvalReport& report,
                                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> created;

  std::string acc = "sensor_set,data_size_days,interval_s,accuracy\n";
  std::string tim = "sensor_set,data_size_days,interval_s,train_time_s\n";
  std::string siz = "sensor_set,interval_s,data_size_days,accuracy,train_time_s\n";
  for (const CellRecord& c : report.cells) {
    acc += c.sensor_set + ',' + fmt("%g", c.data_size_days) + ',' + fmt("%g", c.interval_s) +
           ',' + fmt("%.6f", c.accuracy) + '\n';
    tim += c.sensor_set + ',' + fmt("%g", c.data_size_days) + ',' + fmt("%g", c.interval_s) +
           ',' + fmt("%.6f", c.train_time_s) + '\n';
    siz += c.sensor_set + ',' + fmt("%g", c.interval_s) + ',' + fmt("%g", c.data_size_days) +
           ',' + fmt("%.6f", c.accuracy) + ',' + fmt("%.6f", c.train_time_s) + '\n';
  }
  write_text(dir / "accuracy_vs_interval.csv", acc);
  created.push_back("accuracy_vs_interval.csv");
  write_text(dir / "time_vs_interval.csv", tim);
  created.push_back("time_vs_interval.csv");
  write_text(dir / "accuracy_time_vs_size.csv", siz);
  created.push_back("accuracy_time_vs_size.csv");
  return created;
}

}  // namespace sentinel
