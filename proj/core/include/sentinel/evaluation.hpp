#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sentinel/core.hpp"
#include "sentinel/svm.hpp"

namespace sentinel {

/// How the k folds map to train/test per rotation.
///  kLiteralOneFold: train on 1 fold, test on the other k-1 (train fraction
///  1/k, the reading used for reproduction runs).
///  kStandard: conventional cross validation, train on k-1 folds.
enum class CvMode { kLiteralOneFold, kStandard };

/// Interface strings: "paper-literal" / "standard".
const char* to_string(CvMode m);
CvMode cv_mode_from_string(const std::string& s);

struct EvalConfig {
  int k = 10;
  CvMode mode = CvMode::kLiteralOneFold;
  std::vector<double> intervals_s = {5, 10, 20, 40, 60, 120, 240, 360, 480, 600, 900, 1200};
  std::vector<SensorSet> sensor_sets = SensorSet::all_combinations();
  /// Training data sizes in days; 0 = the whole trace.
  std::vector<double> data_sizes_days = {0};
  double lambda = 1e-2;
  std::uint64_t seed = 1;
  /// Metric averaging over this many derived-seed repetitions per cell.
  int repetitions = 1;
  SolverConfig solver;
  /// When false, train_time_s is reported as 0 so report bytes are fully
  /// seed-determined (wall-clock readings never are).
  bool measure_time = true;
};

/// One sweep cell: metrics for a (sensor set, interval, data size) triple.
/// Rates come from the aggregate confusion counts over all k rotations, so
/// on balanced data accuracy == 1 - (fp_rate + fn_rate)/2 exactly.
struct CellRecord {
  std::string sensor_set;
  double interval_s = 0.0;
  double data_size_days = 0.0;  // 0 = full trace
  double accuracy = 0.0;
  double fp_rate = 0.0;  // non-owner accepted
  double fn_rate = 0.0;  // owner rejected
  double train_time_s = 0.0;
  std::size_t n_train = 0;  // per-rotation training-set size
  std::size_t n_test = 0;   // per-rotation test-set size
  std::uint64_t seed = 0;
};

struct EvalReport {
  std::string owner;
  EvalConfig config;
  std::vector<CellRecord> cells;
};

struct TimingRecord {
  double interval_s = 0.0;
  std::size_t n_train = 0;
  double train_time_s = 0.0;  // median of 3 after a discarded warm-up
};

/// Seeded shuffle dealt round-robin into k folds; sizes differ by at most 1
/// and the folds partition {0..n-1}. Throws if n < k or k < 2.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed);

/// Cross-validated metrics for one cell. Builds the balanced labeled set the
/// same way build_profile does, stratifies folds per class, fits the scaler
/// on each rotation's training split only.
CellRecord evaluate_cell(const std::map<std::string, Trace>& dataset, const std::string& owner,
                         const SensorSet& sensors, double interval_s, double data_size_days,
                         const EvalConfig& config);

/// Full grid: one record per (sensor set, interval, data size), in that
/// nesting order. Cell seeds derive from the cell coordinates, so records do
/// not depend on evaluation order; `jobs` > 1 evaluates cells in parallel.
EvalReport sweep(const std::map<std::string, Trace>& dataset, const std::string& owner,
                 const EvalConfig& config, int jobs = 1);

/// Median-of-3 wall-clock training times per interval (one warm-up run
/// discarded). Runs strictly serially to keep measurements honest.
std::vector<TimingRecord> timing_curve(const std::map<std::string, Trace>& dataset,
                                       const std::string& owner,
                                       const std::vector<double>& intervals_s,
                                       const EvalConfig& config);

/// Accuracy/time as a function of training data size (days, realized by
/// truncating the traces). Sizes must be positive and fit the trace.
std::vector<CellRecord> data_size_curve(const std::map<std::string, Trace>& dataset,
                                        const std::string& owner, const std::vector<double>& days,
                                        const SensorSet& sensors, double interval_s,
                                        const EvalConfig& config);

/// CSV with `# key=value` header lines recording the resolved config.
std::string report_to_csv(const EvalReport& report);
std::string report_to_json_text(const EvalReport& report);

/// Per-figure series files (interval vs accuracy, size vs accuracy/time)
/// written under `dir`; returns the created file names.
std::vector<std::string> write_plot_series(const EvalReport& report,
                                           const std::filesystem::path& dir);

}  // namespace sentinel
