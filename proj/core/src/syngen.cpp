#include "sentinel/syngen.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sentinel/rng.hpp"

namespace sentinel {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kStreamTag = 0x5354524541;  // sub-stream id for takeover streams

void validate_params(const UserParams& p) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (p.acc_noise[i] < 0 || p.ori_noise[i] < 0 || p.mag_noise[i] < 0)
      throw error("syngen: noise std must be non-negative");
  }
  if (p.gait_amplitude != 0.0 && !(p.gait_freq_hz > 0.0))
    throw error("syngen: gait frequency must be positive");
  if (p.ori_variability < 0.0) throw error("syngen: ori_variability must be non-negative");
}

SensorSample draw_sample(const UserParams& p, double t, Rng& rng) {
  SensorSample s;
  s.t = t;
  const double gait = p.gait_amplitude * std::sin(kTwoPi * p.gait_freq_hz * t);
  for (std::size_t i = 0; i < 3; ++i)
    s.acc[i] = p.acc_base[i] + (i == 2 ? gait : 0.0) + rng.normal(0.0, p.acc_noise[i]);
  for (std::size_t i = 0; i < 3; ++i)
    s.ori[i] = p.ori_base[i] + p.ori_variability * rng.normal(0.0, p.ori_noise[i]);
  const double days = t / 86400.0;
  for (std::size_t i = 0; i < 3; ++i)
    s.mag[i] = p.mag_base[i] + p.mag_drift_per_day[i] * days + rng.normal(0.0, p.mag_noise[i]);
  return s;
}

const UserParams& find_user(const ScenarioSpec& spec, const std::string& id, const char* who) {
  for (const ScenarioUser& u : spec.users)
    if (u.id == id) return u.params;
  throw error(std::string(who) + ": unknown user '" + id + "'");
}

nlohmann::json array3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

std::array<double, 3> parse_array3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw error("scenario: expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json params_to_json(const UserParams& p) {
  nlohmann::json j;
  j["acc_base"] = array3(p.acc_base);
  j["ori_base"] = array3(p.ori_base);
  j["mag_base"] = array3(p.mag_base);
  j["acc_noise"] = array3(p.acc_noise);
  j["ori_noise"] = array3(p.ori_noise);
  j["mag_noise"] = array3(p.mag_noise);
  j["gait_amplitude"] = p.gait_amplitude;
  j["gait_freq_hz"] = p.gait_freq_hz;
  j["ori_variability"] = p.ori_variability;
  j["mag_drift_per_day"] = array3(p.mag_drift_per_day);
  return j;
}

UserParams params_from_json(const nlohmann::json& j) {
  UserParams p;
  if (j.contains("acc_base")) p.acc_base = parse_array3(j["acc_base"]);
  if (j.contains("ori_base")) p.ori_base = parse_array3(j["ori_base"]);
  if (j.contains("mag_base")) p.mag_base = parse_array3(j["mag_base"]);
  if (j.contains("acc_noise")) p.acc_noise = parse_array3(j["acc_noise"]);
  if (j.contains("ori_noise")) p.ori_noise = parse_array3(j["ori_noise"]);
  if (j.contains("mag_noise")) p.mag_noise = parse_array3(j["mag_noise"]);
  if (j.contains("gait_amplitude")) p.gait_amplitude = j["gait_amplitude"].get<double>();
  if (j.contains("gait_freq_hz")) p.gait_freq_hz = j["gait_freq_hz"].get<double>();
  if (j.contains("ori_variability")) p.ori_variability = j["ori_variability"].get<double>();
  if (j.contains("mag_drift_per_day")) p.mag_drift_per_day = parse_array3(j["mag_drift_per_day"]);
  return p;
}

}  // namespace

Trace generate_trace(const UserParams& params, const std::string& user_id, double duration_s,
                     double rate_hz, std::uint64_t seed) {
  validate_params(params);
  if (!(duration_s > 0.0)) throw error("generate_trace: duration must be positive");
  if (!(rate_hz > 0.0)) throw error("generate_trace: rate must be positive");
  if (user_id.empty()) throw error("generate_trace: empty user_id");

  const std::size_t n = static_cast<std::size_t>(std::floor(duration_s * rate_hz));
  Trace trace;
  trace.user_id = user_id;
  trace.native_rate_hz = rate_hz;
  trace.samples.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    trace.samples.push_back(draw_sample(params, static_cast<double>(i) / rate_hz, rng));
  return trace;
}

std::map<std::string, Trace> generate_population(const ScenarioSpec& spec) {
  if (spec.users.size() < 2)
    throw error("generate_population: need at least 2 users, got " +
                std::to_string(spec.users.size()));
  std::set<std::string> ids;
  for (const ScenarioUser& u : spec.users)
    if (!ids.insert(u.id).second)
      throw error("generate_population: duplicate user '" + u.id + "'");

  Rng master(spec.seed);
  std::map<std::string, Trace> out;
  for (std::size_t i = 0; i < spec.users.size(); ++i) {
    const ScenarioUser& u = spec.users[i];
    out.emplace(u.id, generate_trace(u.params, u.id, spec.duration_s, spec.native_rate_hz,
                                     master.fork(i).seed()));
  }
  return out;
}

Trace generate_takeover_stream(const ScenarioSpec& spec) {
  if (spec.takeovers.empty())
    throw error("generate_takeover_stream: scenario has no takeover events");
  double prev = 0.0;
  for (const TakeoverEvent& e : spec.takeovers) {
    if (!(e.time_s > prev) || e.time_s >= spec.duration_s)
      throw error("generate_takeover_stream: takeover times must be strictly increasing and "
                  "within the duration");
    prev = e.time_s;
  }

  std::string active = spec.takeovers.front().from_user;
  find_user(spec, active, "generate_takeover_stream");
  for (const TakeoverEvent& e : spec.takeovers)
    find_user(spec, e.to_user, "generate_takeover_stream");

  const std::size_t n =
      static_cast<std::size_t>(std::floor(spec.duration_s * spec.native_rate_hz));
  Trace stream;
  stream.user_id = "stream";
  stream.native_rate_hz = spec.native_rate_hz;
  stream.samples.reserve(n);

  Rng rng(Rng::mix(spec.seed, kStreamTag));
  std::size_t next_event = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.native_rate_hz;
    while (next_event < spec.takeovers.size() && t >= spec.takeovers[next_event].time_s) {
      if (spec.takeovers[next_event].from_user != active)
        throw error("generate_takeover_stream: event at " +
                    std::to_string(spec.takeovers[next_event].time_s) + " s expects user '" +
                    spec.takeovers[next_event].from_user + "' but '" + active + "' is active");
      active = spec.takeovers[next_event].to_user;
      ++next_event;
    }
    stream.samples.push_back(draw_sample(find_user(spec, active, "generate_takeover_stream"), t, rng));
  }
  return stream;
}

double separation(const UserParams& a, const UserParams& b) {
  validate_params(a);
  validate_params(b);
  const std::array<double, 9> mean_a = {a.acc_base[0], a.acc_base[1], a.acc_base[2],
                                        a.ori_base[0], a.ori_base[1], a.ori_base[2],
                                        a.mag_base[0], a.mag_base[1], a.mag_base[2]};
  const std::array<double, 9> mean_b = {b.acc_base[0], b.acc_base[1], b.acc_base[2],
                                        b.ori_base[0], b.ori_base[1], b.ori_base[2],
                                        b.mag_base[0], b.mag_base[1], b.mag_base[2]};
  const std::array<double, 9> std_a = {
      a.acc_noise[0], a.acc_noise[1], a.acc_noise[2],
      a.ori_noise[0] * a.ori_variability, a.ori_noise[1] * a.ori_variability,
      a.ori_noise[2] * a.ori_variability, a.mag_noise[0], a.mag_noise[1], a.mag_noise[2]};
  const std::array<double, 9> std_b = {
      b.acc_noise[0], b.acc_noise[1], b.acc_noise[2],
      b.ori_noise[0] * b.ori_variability, b.ori_noise[1] * b.ori_variability,
      b.ori_noise[2] * b.ori_variability, b.mag_noise[0], b.mag_noise[1], b.mag_noise[2]};

  double sum = 0.0;
  for (std::size_t i = 0; i < 9; ++i) {
    const double diff = mean_a[i] - mean_b[i];
    const double pooled = std::sqrt(0.5 * (std_a[i] * std_a[i] + std_b[i] * std_b[i]));
    if (pooled == 0.0) {
      if (diff != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double z = diff / pooled;
    sum += z * z;
  }
  return std::sqrt(sum);
}

ScenarioSpec make_separated_scenario(std::size_t n_users, double sep, double duration_s,
                                     double native_rate_hz, std::uint64_t seed,
                                     double ori_variability) {
  if (n_users < 2) throw error("make_separated_scenario: need at least 2 users");
  if (sep < 0.0) throw error("make_separated_scenario: separation must be non-negative");

  // Unit-edge tetrahedron: 4 directions with pairwise distance exactly 1.
  static const double kTetra[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  const double tetra_scale = 1.0 / std::sqrt(8.0);

  ScenarioSpec spec;
  spec.duration_s = duration_s;
  spec.native_rate_hz = native_rate_hz;
  spec.seed = seed;

  Rng rng(Rng::mix(seed, 0x5345504152));
  const double per_sensor = sep / std::sqrt(2.0);  // acc and mag each carry sep/sqrt(2)
  for (std::size_t u = 0; u < n_users; ++u) {
    ScenarioUser su;
    su.id = "u" + std::to_string(u);
    su.params.ori_variability = ori_variability;
    su.params.gait_freq_hz = 1.4 + 0.23 * static_cast<double>(u);
    su.params.gait_amplitude = 1.2 + 0.15 * static_cast<double>(u);

    std::array<double, 3> dir{};
    if (u < 4) {
      for (std::size_t i = 0; i < 3; ++i) dir[i] = kTetra[u][i] * tetra_scale;
    } else {
      // beyond 4 users: random unit direction, separation approximate
      double norm = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        dir[i] = rng.normal(0.0, 1.0);
        norm += dir[i] * dir[i];
      }
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < 3; ++i) dir[i] /= norm;
    }
    for (std::size_t i = 0; i < 3; ++i) {
      su.params.acc_base[i] += per_sensor * dir[i] * su.params.acc_noise[i];
      su.params.mag_base[i] += per_sensor * dir[i] * su.params.mag_noise[i];
    }
    spec.users.push_back(std::move(su));
  }
  return spec;
}

ScenarioSpec scenario_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw error(std::string("scenario: ") + e.what());
  }
  ScenarioSpec spec;
  try {
    for (const auto& ju : j.at("users")) {
      ScenarioUser u;
      u.id = ju.at("id").get<std::string>();
      u.params = params_from_json(ju);
      spec.users.push_back(std::move(u));
    }
    spec.duration_s = j.at("duration_s").get<double>();
    if (j.contains("native_rate_hz")) spec.native_rate_hz = j["native_rate_hz"].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("takeovers")) {
      for (const auto& je : j["takeovers"]) {
        TakeoverEvent e;
        e.time_s = je.at("time_s").get<double>();
        e.from_user = je.at("from_user").get<std::string>();
        e.to_user = je.at("to_user").get<std::string>();
        spec.takeovers.push_back(std::move(e));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw error(std::string("scenario: ") + e.what());
  }
  return spec;
}

std::string scenario_to_json_text(const ScenarioSpec& spec) {
  nlohmann::json j;
  j["duration_s"] = spec.duration_s;
  j["native_rate_hz"] = spec.native_rate_hz;
  j["seed"] = spec.seed;
  j["users"] = nlohmann::json::array();
  for (const ScenarioUser& u : spec.users) {
    nlohmann::json ju = params_to_json(u.params);
    ju["id"] = u.id;
    j["users"].push_back(std::move(ju));
  }
  j["takeovers"] = nlohmann::json::array();
  for (const TakeoverEvent& e : spec.takeovers)
    j["takeovers"].push_back(
        {{"time_s", e.time_s}, {"from_user", e.from_user}, {"to_user", e.to_user}});
  return j.dump(2) + "\n";
}

ScenarioSpec load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw error("cannot open scenario file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw error("cannot write scenario file: " + file.string());
  out << scenario_to_json_text(spec);
}

}  // namespace sentinel
