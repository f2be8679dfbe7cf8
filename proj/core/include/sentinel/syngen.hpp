#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sentinel/core.hpp"

namespace sentinel {

/// Generative parameters for one synthetic user. Per sample at time t:
///   acc = acc_base + gait_amplitude * sin(2*pi*gait_freq_hz*t) * e_z + N(0, acc_noise)
///   ori = ori_base + ori_variability * N(0, ori_noise)
///   mag = mag_base + mag_drift_per_day * (t / 86400) + N(0, mag_noise)
struct UserParams {
  std::array<double, 3> acc_base{0.0, 0.0, 9.81};
  std::array<double, 3> ori_base{0.1, -0.4, 0.05};
  std::array<double, 3> mag_base{22.0, 5.0, -41.0};
  std::array<double, 3> acc_noise{0.6, 0.6, 0.8};
  std::array<double, 3> ori_noise{0.25, 0.25, 0.25};
  std::array<double, 3> mag_noise{6.0, 6.0, 6.0};
  double gait_amplitude = 1.2;
  double gait_freq_hz = 1.6;
  double ori_variability = 3.0;
  std::array<double, 3> mag_drift_per_day{0.0, 0.0, 0.0};
};

struct ScenarioUser {
  std::string id;
  UserParams params;
};

/// Control switches from one user's generator to another's mid-stream.
struct TakeoverEvent {
  double time_s = 0.0;
  std::string from_user;
  std::string to_user;
};

/// A full synthetic experiment: population, duration, rate, optional
/// takeover storyline for streaming fixtures, and the master seed.
struct ScenarioSpec {
  std::vector<ScenarioUser> users;
  double duration_s = 3600.0;
  double native_rate_hz = 5.0;
  std::vector<TakeoverEvent> takeovers;
  std::uint64_t seed = 1;
};

/// Generates floor(duration_s * rate_hz) samples at t = k / rate_hz.
/// Deterministic per seed.
Trace generate_trace(const UserParams& params, const std::string& user_id, double duration_s,
                     double rate_hz, std::uint64_t seed);

/// One independent seeded trace per user. Requires >= 2 users, unique ids.
std::map<std::string, Trace> generate_population(const ScenarioSpec& spec);

/// Single composite stream following the takeover storyline: starts as the
/// first event's from_user and switches generators at each event time.
/// Requires at least one takeover event.
Trace generate_takeover_stream(const ScenarioSpec& spec);

/// Pooled-std-normalized distance between the 9-dim baseline means; the
/// generator's difficulty knob (0 = indistinguishable). Orientation noise is
/// taken at its effective scale (ori_noise * ori_variability).
double separation(const UserParams& a, const UserParams& b);

/// Builds n_users with pairwise baseline separation `sep` spread evenly over
/// accelerometer and magnetometer axes (exact for n_users <= 4, approximate
/// beyond). Orientation carries no baseline offset, so it stays the weak
/// sensor at the default ori_variability.
ScenarioSpec make_separated_scenario(std::size_t n_users, double sep, double duration_s,
                                     double native_rate_hz, std::uint64_t seed,
                                     double ori_variability = 3.0);

ScenarioSpec scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::filesystem::path& file);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& file);

}  // namespace sentinel
