#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sentinel {

/// Base class for all errors raised by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by trace/manifest parsing; carries the 1-based line number.
struct parse_error : error {
  std::size_t line;
  parse_error(std::size_t line_no, const std::string& what_arg)
      : error("line " + std::to_string(line_no) + ": " + what_arg), line(line_no) {}
};

/// One timestamped reading from the three sensors, three axes each.
/// Timestamps are seconds relative to the start of the trace.
struct SensorSample {
  double t = 0.0;
  std::array<double, 3> acc{};  // m/s^2
  std::array<double, 3> ori{};  // rad
  std::array<double, 3> mag{};  // microtesla
};

/// All nine components in canonical order:
/// (acc_x, acc_y, acc_z, ori_x, ori_y, ori_z, mag_x, mag_y, mag_z).
std::array<double, 9> flatten(const SensorSample& s);

bool all_finite(const SensorSample& s);

/// Ordered sensor readings for one user plus declared capture rate.
struct Trace {
  std::string user_id;
  std::vector<SensorSample> samples;
  double native_rate_hz = 0.0;

  /// Seconds from first to last sample (0 for traces with < 2 samples).
  double duration_s() const;
};

/// Throws sentinel::error unless user_id is non-empty, native_rate_hz > 0,
/// timestamps are non-negative, strictly increasing and all values finite.
void validate_trace(const Trace& trace);

/// Returns the prefix of `trace` whose timestamps are < cutoff_s.
Trace truncate_trace(const Trace& trace, double cutoff_s);

/// Which of the three sensors participate in a feature vector.
/// At least one must be enabled; projected dimension is 3 x enabled count.
class SensorSet {
 public:
  SensorSet(bool acc, bool ori, bool mag);

  static SensorSet all() { return SensorSet(true, true, true); }

  /// Parses comma- or plus-separated names, e.g. "acc,mag" or "acc+ori+mag".
  static SensorSet parse(const std::string& text);

  bool acc() const { return acc_; }
  bool ori() const { return ori_; }
  bool mag() const { return mag_; }

  std::size_t dimension() const;

  /// Canonical name, e.g. "acc+mag". Stable across runs; safe in CSV cells.
  std::string to_string() const;

  /// The seven valid combinations: singles, pairs, then all three.
  static std::vector<SensorSet> all_combinations();

  bool operator==(const SensorSet&) const = default;

 private:
  bool acc_, ori_, mag_;
};

/// A real vector of dimension 3, 6 or 9 with an optional class label.
struct FeatureVector {
  std::vector<double> values;
  std::optional<int> label;  // +1 owner, -1 other
};

/// Keeps the enabled sensor triples of a 9-dim vector, in canonical order.
/// Throws on dimension mismatch. Labels pass through untouched.
FeatureVector project(const FeatureVector& v, const SensorSet& sensors);

}  // namespace sentinel
