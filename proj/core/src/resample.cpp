#include "sentinel/resample.hpp"

#include <cmath>
#include <cstdint>

namespace sentinel {

namespace {

ResampledPoint make_point(double window_start, const std::array<double, 9>& sums,
                          std::size_t count) {
  ResampledPoint p;
  p.window_start_s = window_start;
  p.sample_count = count;
  p.features.values.resize(9);
  for (std::size_t i = 0; i < 9; ++i)
    p.features.values[i] = sums[i] / static_cast<double>(count);
  return p;
}

}  // namespace

std::vector<ResampledPoint> resample(const Trace& trace, const ResampleSpec& spec) {
  if (trace.samples.empty()) throw error("resample: empty trace");
  if (!(spec.interval_s > 0.0) || !std::isfinite(spec.interval_s))
    throw error("resample: interval_s must be positive");
  if (spec.interval_s * trace.native_rate_hz < 1.0 - 1e-9)
    throw error("resample: interval " + std::to_string(spec.interval_s) +
                " s is finer than the native sample spacing (" +
                std::to_string(1.0 / trace.native_rate_hz) + " s)");

  std::vector<ResampledPoint> out;
  std::array<double, 9> sums{};
  std::size_t count = 0;
  std::int64_t current = -1;

  for (const SensorSample& s : trace.samples) {
    const std::int64_t idx = static_cast<std::int64_t>(std::floor(s.t / spec.interval_s));
    if (idx != current) {
      if (count > 0)
        out.push_back(make_point(static_cast<double>(current) * spec.interval_s, sums, count));
      sums = {};
      count = 0;
      current = idx;
    }
    const std::array<double, 9> row = flatten(s);
    for (std::size_t i = 0; i < 9; ++i) sums[i] += row[i];
    ++count;
  }
  if (count > 0)
    out.push_back(make_point(static_cast<double>(current) * spec.interval_s, sums, count));
  return out;
}

std::vector<ResampledPoint> resample_by_count(const Trace& trace,
                                              std::size_t samples_per_window) {
  if (trace.samples.empty()) throw error("resample_by_count: empty trace");
  if (samples_per_window == 0) throw error("resample_by_count: window of 0 samples");

  std::vector<ResampledPoint> out;
  std::array<double, 9> sums{};
  std::size_t count = 0;
  double window_start = 0.0;

  for (const SensorSample& s : trace.samples) {
    if (count == 0) window_start = s.t;
    const std::array<double, 9> row = flatten(s);
    for (std::size_t i = 0; i < 9; ++i) sums[i] += row[i];
    if (++count == samples_per_window) {
      out.push_back(make_point(window_start, sums, count));
      sums = {};
      count = 0;
    }
  }
  if (count > 0) out.push_back(make_point(window_start, sums, count));
  return out;
}

std::size_t effective_count(std::size_t n_samples, double native_rate_hz, double interval_s) {
  if (n_samples == 0) return 0;
  const double per_window = native_rate_hz * interval_s;
  const double q = static_cast<double>(n_samples) / per_window;
  const double f = std::floor(q);
  // Tolerant ceil: q a hair above an integer is treated as that integer.
  return static_cast<std::size_t>((q - f > 1e-9) ? f + 1.0 : f);
}

std::vector<FeatureVector> extract_features(const Trace& trace, const ResampleSpec& spec,
                                            const SensorSet& sensors) {
  std::vector<ResampledPoint> points = resample(trace, spec);
  std::vector<FeatureVector> out;
  out.reserve(points.size());
  for (ResampledPoint& p : points) out.push_back(project(p.features, sensors));
  return out;
}

}  // namespace sentinel
