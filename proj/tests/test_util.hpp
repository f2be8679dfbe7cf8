#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sentinel/core.hpp"
#include "sentinel/rng.hpp"

namespace testutil {

/// Temporary directory removed when the fixture goes out of scope.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("sentinel_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Uniform gap-free trace at `rate_hz` where component j of sample i is
/// base + i + j/10 (distinct everywhere, easy to reason about).
inline sentinel::Trace ramp_trace(std::size_t n, double rate_hz, double base = 0.0) {
  sentinel::Trace t;
  t.user_id = "ramp";
  t.native_rate_hz = rate_hz;
  for (std::size_t i = 0; i < n; ++i) {
    sentinel::SensorSample s;
    s.t = static_cast<double>(i) / rate_hz;
    for (std::size_t j = 0; j < 3; ++j) {
      s.acc[j] = base + static_cast<double>(i) + static_cast<double>(j) / 10.0;
      s.ori[j] = base + static_cast<double>(i) + static_cast<double>(3 + j) / 10.0;
      s.mag[j] = base + static_cast<double>(i) + static_cast<double>(6 + j) / 10.0;
    }
    t.samples.push_back(s);
  }
  return t;
}

/// Random trace with irregular spacing and occasional long gaps.
inline sentinel::Trace random_gap_trace(std::uint64_t seed, std::size_t n) {
  sentinel::Rng rng(seed);
  sentinel::Trace t;
  t.user_id = "gap";
  t.native_rate_hz = 5.0;
  double time = rng.uniform(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    sentinel::SensorSample s;
    s.t = time;
    for (std::size_t j = 0; j < 3; ++j) {
      s.acc[j] = rng.uniform(-100.0, 100.0);
      s.ori[j] = rng.uniform(-3.0, 3.0);
      s.mag[j] = rng.uniform(-60.0, 60.0);
    }
    t.samples.push_back(s);
    time += 0.2;
    if (rng.next_double() < 0.05) time += rng.uniform(1.0, 40.0);  // gap
  }
  return t;
}

}  // namespace testutil
