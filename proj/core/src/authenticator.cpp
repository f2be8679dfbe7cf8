#include "sentinel/authenticator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sentinel/rng.hpp"

namespace sentinel {

namespace {

constexpr std::uint64_t kNegativeDrawTag = 0x4e4547;
constexpr std::uint64_t kSolverTag = 0x534f4c;

Verdict score_window(const Profile& profile, std::span<const SensorSample> samples,
                     double window_start, double window_end) {
  Trace window;
  window.user_id = "window";
  // Self-consistent rate: the interval check is for declared datasets, not
  // for ad-hoc detection windows.
  window.native_rate_hz = 1.0 / profile.resample.interval_s;
  window.samples.assign(samples.begin(), samples.end());

  std::vector<FeatureVector> features =
      extract_features(window, profile.resample, profile.sensors);
  if (features.empty()) throw error("authenticate_window: empty window");

  double score_sum = 0.0;
  std::size_t accepted = 0;
  for (const FeatureVector& f : features) {
    const Prediction p = predict(profile.model, apply_scaler(profile.scaler, f).values);
    score_sum += p.score;
    if (p.label > 0) ++accepted;
  }

  Verdict v;
  v.n_vectors = features.size();
  v.mean_score = score_sum / static_cast<double>(features.size());
  v.window_start_s = window_start;
  v.window_end_s = window_end;
  const bool ok = profile.majority_vote ? (2 * accepted > features.size())
                                        : (v.mean_score > 0.0);
  v.decision = ok ? Decision::kAuthentic : Decision::kAnomalous;
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

const char* to_string(Decision d) {
  return d == Decision::kAuthentic ? "AUTHENTIC" : "ANOMALOUS";
}

std::vector<FeatureVector> build_training_set(const std::vector<FeatureVector>& owner_vectors,
                                              const std::vector<FeatureVector>& negatives_pool,
                                              const std::vector<std::string>& negatives_sources,
                                              std::uint64_t seed,
                                              std::vector<std::string>* drawn_from,
                                              bool* with_replacement) {
  if (owner_vectors.empty()) throw error("build_training_set: no owner vectors");
  if (negatives_pool.empty()) throw error("build_training_set: empty negatives pool");
  if (negatives_sources.size() != negatives_pool.size())
    throw error("build_training_set: pool/source size mismatch");

  const std::size_t n = owner_vectors.size();
  Rng rng(Rng::mix(seed, kNegativeDrawTag));

  std::vector<std::size_t> picked;
  picked.reserve(n);
  bool replacement = negatives_pool.size() < n;
  if (!replacement) {
    // partial Fisher-Yates: the first n entries of a seeded shuffle
    std::vector<std::size_t> idx(negatives_pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(idx);
    picked.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      picked.push_back(static_cast<std::size_t>(rng.below(negatives_pool.size())));
  }

  std::vector<FeatureVector> training;
  training.reserve(2 * n);
  for (const FeatureVector& v : owner_vectors) {
    FeatureVector f = v;
    f.label = 1;
    training.push_back(std::move(f));
  }
  std::set<std::string> sources;
  for (std::size_t i : picked) {
    FeatureVector f = negatives_pool[i];
    f.label = -1;
    training.push_back(std::move(f));
    sources.insert(negatives_sources[i]);
  }
  if (drawn_from) drawn_from->assign(sources.begin(), sources.end());
  if (with_replacement) *with_replacement = replacement;
  return training;
}

Profile build_profile(const Trace& owner, const std::map<std::string, Trace>& others,
                      const SensorSet& sensors, const ResampleSpec& spec, double lambda,
                      std::uint64_t seed, const BuildOptions& options) {
  if (others.empty()) throw error("build_profile: no other users to draw negatives from");
  if (options.detection_window_s < spec.interval_s)
    throw error("build_profile: detection window (" +
                std::to_string(options.detection_window_s) +
                " s) must be at least the resample interval");

  std::vector<FeatureVector> owner_vectors = extract_features(owner, spec, sensors);
  if (owner_vectors.size() < 20)
    throw error("build_profile: insufficient owner data: need >= 20 feature vectors, got " +
                std::to_string(owner_vectors.size()));

  std::vector<FeatureVector> pool;
  std::vector<std::string> pool_sources;
  for (const auto& [id, trace] : others) {
    if (id == owner.user_id) continue;
    for (FeatureVector& f : extract_features(trace, spec, sensors)) {
      pool.push_back(std::move(f));
      pool_sources.push_back(id);
    }
  }
  if (pool.empty()) throw error("build_profile: negatives pool is empty after resampling");

  Profile profile;
  profile.owner_id = owner.user_id;
  profile.sensors = sensors;
  profile.resample = spec;
  profile.detection_window_s = options.detection_window_s;
  profile.majority_vote = options.majority_vote;
  profile.trained_at = options.trained_at;
  profile.seed = seed;

  std::vector<FeatureVector> training =
      build_training_set(owner_vectors, pool, pool_sources, seed,
                         &profile.negative_source_ids, &profile.negatives_with_replacement);

  profile.scaler = fit_scaler(training);
  training = apply_scaler(profile.scaler, std::move(training));

  SolverConfig solver = options.solver;
  solver.seed = Rng::mix(seed, kSolverTag);
  profile.model = train(training, lambda, solver);
  return profile;
}

Verdict authenticate_window(const Profile& profile, std::span<const SensorSample> samples) {
  if (samples.empty()) throw error("authenticate_window: empty window");
  const double span = samples.back().t - samples.front().t;
  if (span > profile.detection_window_s + 1e-9)
    throw error("authenticate_window: samples span " + std::to_string(span) +
                " s, longer than the detection window");
  return score_window(profile, samples, samples.front().t, samples.back().t);
}

StreamMonitor::StreamMonitor(Profile profile) : profile_(std::move(profile)) {
  if (profile_.detection_window_s < profile_.resample.interval_s)
    throw error("StreamMonitor: detection window shorter than the resample interval");
}

std::optional<Verdict> StreamMonitor::push(const SensorSample& sample) {
  if (!all_finite(sample) || sample.t < 0.0 || sample.t <= last_t_) {
    ++dropped_;
    return std::nullopt;
  }
  last_t_ = sample.t;
  const std::int64_t idx =
      static_cast<std::int64_t>(std::floor(sample.t / profile_.detection_window_s));
  std::optional<Verdict> verdict;
  if (window_index_ >= 0 && idx > window_index_) verdict = flush();
  window_index_ = idx;
  window_.push_back(sample);
  return verdict;
}

std::optional<Verdict> StreamMonitor::finish() {
  std::optional<Verdict> verdict;
  if (!window_.empty()) verdict = flush();
  window_index_ = -1;
  return verdict;
}

std::optional<Verdict> StreamMonitor::flush() {
  const double start = static_cast<double>(window_index_) * profile_.detection_window_s;
  Verdict v = score_window(profile_, window_, start, start + profile_.detection_window_s);
  window_.clear();
  return v;
}

Profile daily_retrain(const Profile& old_profile, const Trace& new_owner,
                      const std::map<std::string, Trace>& others, double lambda,
                      const RetrainOptions& options) {
  if (new_owner.samples.empty()) throw error("daily_retrain: empty new trace");
  if (!options.force && new_owner.duration_s() < 86400.0 - 1e-6)
    throw error("daily_retrain: new trace spans " + std::to_string(new_owner.duration_s()) +
                " s, less than one day (use force to override)");
  BuildOptions build;
  build.detection_window_s = old_profile.detection_window_s;
  build.majority_vote = old_profile.majority_vote;
  build.trained_at = options.trained_at;
  build.solver = options.solver;
  return build_profile(new_owner, others, old_profile.sensors, old_profile.resample, lambda,
                       old_profile.seed, build);
}

std::string profile_to_json_text(const Profile& profile) {
  nlohmann::json j;
  j["w"] = profile.model.w;
  j["b"] = profile.model.b;
  j["lambda"] = profile.model.lambda;
  j["scaler"] = {{"mean", profile.scaler.mean}, {"std", profile.scaler.stddev}};
  j["sensor_set"] = profile.sensors.to_string();
  j["interval_s"] = profile.resample.interval_s;
  j["seed"] = profile.seed;
  j["owner_id"] = profile.owner_id;
  j["detection_window_s"] = profile.detection_window_s;
  j["trained_at"] = profile.trained_at;
  j["negative_source_ids"] = profile.negative_source_ids;
  j["negatives_with_replacement"] = profile.negatives_with_replacement;
  j["majority_vote"] = profile.majority_vote;
  return j.dump(2) + "\n";
}

Profile profile_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw error(std::string("profile: ") + e.what());
  }
  Profile p;
  try {
    p.model.w = j.at("w").get<std::vector<double>>();
    p.model.b = j.at("b").get<double>();
    p.model.lambda = j.at("lambda").get<double>();
    p.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    p.scaler.stddev = j.at("scaler").at("std").get<std::vector<double>>();
    p.sensors = SensorSet::parse(j.at("sensor_set").get<std::string>());
    p.resample.interval_s = j.at("interval_s").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.owner_id = j.at("owner_id").get<std::string>();
    p.detection_window_s = j.at("detection_window_s").get<double>();
    if (j.contains("trained_at")) p.trained_at = j["trained_at"].get<std::string>();
    if (j.contains("negative_source_ids"))
      p.negative_source_ids = j["negative_source_ids"].get<std::vector<std::string>>();
    if (j.contains("negatives_with_replacement"))
      p.negatives_with_replacement = j["negatives_with_replacement"].get<bool>();
    if (j.contains("majority_vote")) p.majority_vote = j["majority_vote"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw error(std::string("profile: ") + e.what());
  }
  if (p.model.w.size() != p.sensors.dimension())
    throw error("profile: model dimension " + std::to_string(p.model.w.size()) +
                " does not match sensor set '" + p.sensors.to_string() + "'");
  if (p.scaler.mean.size() != p.model.w.size() || p.scaler.stddev.size() != p.model.w.size())
    throw error("profile: scaler dimension does not match the model");
  if (p.detection_window_s < p.resample.interval_s)
    throw error("profile: detection window shorter than the resample interval");
  return p;
}

void save_profile(const Profile& profile, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw error("cannot write profile: " + file.string());
  out << profile_to_json_text(profile);
}

Profile load_profile(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw error("cannot open profile: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return profile_from_json_text(buf.str());
}

std::string verdict_to_json_line(const Verdict& verdict) {
  std::string out = "{\"decision\":\"";
  out += to_string(verdict.decision);
  out += "\",\"mean_score\":";
  out += format_double(verdict.mean_score);
  out += ",\"window_start_s\":";
  out += format_double(verdict.window_start_s);
  out += ",\"window_end_s\":";
  out += format_double(verdict.window_end_s);
  out += ",\"n_vectors\":";
  out += std::to_string(verdict.n_vectors);
  out += "}";
  return out;
}

}  // namespace sentinel
