#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/core.hpp"
#include "sentinel/resample.hpp"
#include "sentinel/svm.hpp"

namespace sentinel {

/// Persisted per-owner model: everything needed to score new sensor data.
struct Profile {
  std::string owner_id;
  LinearModel model;
  Scaler scaler;
  SensorSet sensors = SensorSet::all();
  ResampleSpec resample;
  double detection_window_s = 20.0;
  std::string trained_at;  // ISO date, informational
  std::vector<std::string> negative_source_ids;
  std::uint64_t seed = 0;
  /// Set when the negatives pool was smaller than the owner's vector count
  /// and sampling fell back to drawing with replacement.
  bool negatives_with_replacement = false;
  /// Decide by majority of per-vector labels instead of sign of mean score.
  bool majority_vote = false;
};

enum class Decision { kAuthentic, kAnomalous };

const char* to_string(Decision d);

struct Verdict {
  Decision decision = Decision::kAnomalous;
  double mean_score = 0.0;
  double window_start_s = 0.0;
  double window_end_s = 0.0;
  std::size_t n_vectors = 0;
};

struct BuildOptions {
  double detection_window_s = 20.0;
  bool majority_vote = false;
  std::string trained_at;
  SolverConfig solver;
};

/// Balanced training set: all owner vectors labeled +1 plus an equal number
/// drawn seeded from the pooled negatives labeled -1 (without replacement
/// while the pool allows). `drawn_from` collects the contributing user ids.
std::vector<FeatureVector> build_training_set(const std::vector<FeatureVector>& owner_vectors,
                                              const std::vector<FeatureVector>& negatives_pool,
                                              const std::vector<std::string>& negatives_sources,
                                              std::uint64_t seed,
                                              std::vector<std::string>* drawn_from,
                                              bool* with_replacement);

/// Resamples the owner and the other users, builds the balanced labeled set,
/// fits the scaler on it and trains the linear model. Requires >= 20 owner
/// feature vectors and at least one other user. Deterministic per seed.
Profile build_profile(const Trace& owner, const std::map<std::string, Trace>& others,
                      const SensorSet& sensors, const ResampleSpec& spec, double lambda,
                      std::uint64_t seed, const BuildOptions& options = {});

/// Scores one detection window worth of raw samples: resample, project,
/// scale, score, then decide from the mean score (fail-closed: mean 0 is
/// anomalous). Samples must be in order and span at most detection_window_s.
Verdict authenticate_window(const Profile& profile, std::span<const SensorSample> samples);

/// Tumbling-window monitor over a live sample stream. Windows are
/// [k*W, (k+1)*W) with W = profile.detection_window_s; one Verdict per
/// non-empty completed window. Out-of-order samples are dropped and counted.
class StreamMonitor {
 public:
  explicit StreamMonitor(Profile profile);

  /// Feeds one sample; returns a Verdict when this sample closes a window.
  std::optional<Verdict> push(const SensorSample& sample);

  /// Flushes the final partial window, if any.
  std::optional<Verdict> finish();

  std::size_t dropped() const { return dropped_; }
  const Profile& profile() const { return profile_; }

 private:
  std::optional<Verdict> flush();

  Profile profile_;
  std::vector<SensorSample> window_;
  std::int64_t window_index_ = -1;
  double last_t_ = -1.0;
  std::size_t dropped_ = 0;
};

struct RetrainOptions {
  /// Accept a new trace shorter than one day.
  bool force = false;
  std::string trained_at;
  SolverConfig solver;
};

/// Full daily replacement: a fresh profile trained on the new trace with the
/// old profile's sensors, interval, lambda settings and seed.
Profile daily_retrain(const Profile& old_profile, const Trace& new_owner,
                      const std::map<std::string, Trace>& others, double lambda,
                      const RetrainOptions& options = {});

std::string profile_to_json_text(const Profile& profile);
Profile profile_from_json_text(const std::string& text);
void save_profile(const Profile& profile, const std::filesystem::path& file);
Profile load_profile(const std::filesystem::path& file);

/// Verdict as a single-line JSON object (the monitor's output format).
std::string verdict_to_json_line(const Verdict& verdict);

}  // namespace sentinel
