#include <doctest.h>

#include <cmath>

#include "sentinel/ingest.hpp"
#include "sentinel/syngen.hpp"
#include "test_util.hpp"

using namespace sentinel;

namespace {

UserParams quiet_params() {
  UserParams p;
  p.acc_noise = {0, 0, 0};
  p.ori_noise = {0, 0, 0};
  p.mag_noise = {0, 0, 0};
  p.gait_amplitude = 0.0;
  p.mag_drift_per_day = {0, 0, 0};
  return p;
}

}  // namespace

TEST_CASE("degenerate generator produces a constant trace at the baselines") {
  const UserParams p = quiet_params();
  const Trace t = generate_trace(p, "u", 10.0, 5.0, 42);
  REQUIRE(t.samples.size() == 50);  // floor(duration * rate)
  for (const SensorSample& s : t.samples) {
    CHECK(s.acc == p.acc_base);
    CHECK(s.ori == p.ori_base);
    CHECK(s.mag == p.mag_base);
  }
}

TEST_CASE("sample count is floor(duration * rate)") {
  CHECK(generate_trace(UserParams{}, "u", 10.0, 5.0, 1).samples.size() == 50);
  CHECK(generate_trace(UserParams{}, "u", 10.1, 5.0, 1).samples.size() == 50);
  CHECK(generate_trace(UserParams{}, "u", 0.3, 5.0, 1).samples.size() == 1);
  CHECK_THROWS_AS(generate_trace(UserParams{}, "u", 0.0, 5.0, 1), error);
  CHECK_THROWS_AS(generate_trace(UserParams{}, "u", 10.0, -5.0, 1), error);
}

TEST_CASE("empirical means stay within the law-of-large-numbers bound") {
  UserParams p;
  p.gait_freq_hz = 2.0;  // 0.4 cycles per sample at 5 Hz: the sinusoid sums to 0 over 5 samples
  p.mag_drift_per_day = {0, 0, 0};
  const std::size_t n = 100000;
  const Trace t = generate_trace(p, "u", static_cast<double>(n) / 5.0, 5.0, 2024);
  REQUIRE(t.samples.size() == n);

  std::array<long double, 9> sum{};
  for (const SensorSample& s : t.samples) {
    const auto row = flatten(s);
    for (std::size_t j = 0; j < 9; ++j) sum[j] += row[j];
  }
  const std::array<double, 9> expected = {p.acc_base[0], p.acc_base[1], p.acc_base[2],
                                          p.ori_base[0], p.ori_base[1], p.ori_base[2],
                                          p.mag_base[0], p.mag_base[1], p.mag_base[2]};
  const std::array<double, 9> stds = {p.acc_noise[0], p.acc_noise[1], p.acc_noise[2],
                                      p.ori_noise[0] * p.ori_variability,
                                      p.ori_noise[1] * p.ori_variability,
                                      p.ori_noise[2] * p.ori_variability,
                                      p.mag_noise[0], p.mag_noise[1], p.mag_noise[2]};
  for (std::size_t j = 0; j < 9; ++j) {
    const double mean = static_cast<double>(sum[j] / static_cast<long double>(n));
    CHECK(std::abs(mean - expected[j]) <= 3.0 * stds[j] / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("generation is deterministic per seed") {
  const UserParams p;
  const std::string a = write_trace(generate_trace(p, "u", 60.0, 5.0, 9));
  const std::string b = write_trace(generate_trace(p, "u", 60.0, 5.0, 9));
  const std::string c = write_trace(generate_trace(p, "u", 60.0, 5.0, 10));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("population: errors and reproducibility") {
  ScenarioSpec spec = make_separated_scenario(4, 3.0, 30.0, 5.0, 5);
  const auto pop1 = generate_population(spec);
  const auto pop2 = generate_population(spec);
  REQUIRE(pop1.size() == 4);
  for (const auto& [id, trace] : pop1) {
    CHECK(trace.samples.size() == 150);
    CHECK(write_trace(trace) == write_trace(pop2.at(id)));
  }
  // distinct users get distinct streams
  CHECK(write_trace(pop1.at("u0")) != write_trace(pop1.at("u1")));

  ScenarioSpec one = spec;
  one.users.resize(1);
  CHECK_THROWS_AS(generate_population(one), error);

  ScenarioSpec dup = spec;
  dup.users[1].id = dup.users[0].id;
  CHECK_THROWS_AS(generate_population(dup), error);
}

TEST_CASE("separation: identity, single-axis case, symmetry") {
  const UserParams a;
  CHECK(separation(a, a) == 0.0);

  UserParams b = a;
  b.acc_base[0] += 6.0 * a.acc_noise[0];  // 6 pooled stds along one axis
  CHECK(separation(a, b) == doctest::Approx(6.0));
  CHECK(separation(b, a) == doctest::Approx(6.0));

  // the orientation axes are normalized by their effective (multiplied) std
  UserParams c = a;
  c.ori_base[0] += 2.0 * a.ori_noise[0] * a.ori_variability;
  CHECK(separation(a, c) == doctest::Approx(2.0));
}

TEST_CASE("make_separated_scenario hits the requested pairwise separation") {
  const ScenarioSpec spec = make_separated_scenario(4, 3.0, 30.0, 5.0, 1);
  REQUIRE(spec.users.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      CHECK(separation(spec.users[i].params, spec.users[j].params) ==
            doctest::Approx(3.0).epsilon(1e-9));

  const ScenarioSpec zero = make_separated_scenario(3, 0.0, 30.0, 5.0, 1);
  CHECK(separation(zero.users[0].params, zero.users[1].params) == doctest::Approx(0.0));
}

TEST_CASE("takeover stream switches generators at the event times") {
  ScenarioSpec spec = make_separated_scenario(2, 8.0, 80.0, 5.0, 12);
  spec.takeovers.push_back({40.0, "u0", "u1"});
  const Trace stream = generate_takeover_stream(spec);
  REQUIRE(stream.samples.size() == 400);

  // compare acc_y means before/after the takeover against the two baselines
  // (the y offsets of the first two tetrahedron users have opposite signs)
  const double base0 = spec.users[0].params.acc_base[1];
  const double base1 = spec.users[1].params.acc_base[1];
  double before = 0, after = 0;
  for (std::size_t i = 0; i < 200; ++i) before += stream.samples[i].acc[1];
  for (std::size_t i = 200; i < 400; ++i) after += stream.samples[i].acc[1];
  before /= 200;
  after /= 200;
  CHECK(std::abs(before - base0) < std::abs(before - base1));
  CHECK(std::abs(after - base1) < std::abs(after - base0));

  // deterministic
  CHECK(write_trace(generate_takeover_stream(spec)) == write_trace(stream));

  ScenarioSpec no_events = spec;
  no_events.takeovers.clear();
  CHECK_THROWS_AS(generate_takeover_stream(no_events), error);

  ScenarioSpec bad_time = spec;
  bad_time.takeovers[0].time_s = 100.0;  // beyond the duration
  CHECK_THROWS_AS(generate_takeover_stream(bad_time), error);
}

TEST_CASE("scenario JSON round trip") {
  ScenarioSpec spec = make_separated_scenario(3, 2.5, 120.0, 5.0, 31);
  spec.takeovers.push_back({60.0, "u0", "u2"});
  const ScenarioSpec back = scenario_from_json_text(scenario_to_json_text(spec));
  REQUIRE(back.users.size() == 3);
  CHECK(back.duration_s == spec.duration_s);
  CHECK(back.native_rate_hz == spec.native_rate_hz);
  CHECK(back.seed == spec.seed);
  REQUIRE(back.takeovers.size() == 1);
  CHECK(back.takeovers[0].to_user == "u2");
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.users[i].id == spec.users[i].id);
    CHECK(back.users[i].params.acc_base == spec.users[i].params.acc_base);
    CHECK(back.users[i].params.mag_base == spec.users[i].params.mag_base);
    CHECK(back.users[i].params.ori_variability == spec.users[i].params.ori_variability);
  }
  // byte-identical regeneration from the round-tripped spec
  CHECK(write_trace(generate_population(back).at("u1")) ==
        write_trace(generate_population(spec).at("u1")));
}
