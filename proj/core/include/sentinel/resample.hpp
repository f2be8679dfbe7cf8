#pragma once

#include <cstddef>
#include <vector>

#include "sentinel/core.hpp"

namespace sentinel {

/// Length in seconds of the averaging window.
struct ResampleSpec {
  double interval_s = 20.0;
};

/// One averaged window: its start on the [k*interval, (k+1)*interval) grid,
/// how many raw samples fell into it, and their componentwise mean.
struct ResampledPoint {
  double window_start_s = 0.0;
  std::size_t sample_count = 0;
  FeatureVector features;  // 9-dim, unlabeled
};

/// Partitions the time axis into consecutive windows of spec.interval_s
/// anchored at t = 0 and emits the arithmetic mean of each non-empty window.
/// Empty windows are skipped; a partial trailing window is emitted.
/// Throws if the trace is empty or the interval is finer than the trace's
/// native sample spacing.
std::vector<ResampledPoint> resample(const Trace& trace, const ResampleSpec& spec);

/// Count-based alternative: averages every `samples_per_window` consecutive
/// samples (partial tail included). On a gap-free uniform trace this agrees
/// with time-based windows of samples_per_window / native_rate_hz seconds.
std::vector<ResampledPoint> resample_by_count(const Trace& trace, std::size_t samples_per_window);

/// Expected output length of resample() for a gap-free uniform trace:
/// ceil(n_samples / (native_rate_hz * interval_s)).
std::size_t effective_count(std::size_t n_samples, double native_rate_hz, double interval_s);

/// resample + project in one step: the usual feature-extraction pipeline.
std::vector<FeatureVector> extract_features(const Trace& trace, const ResampleSpec& spec,
                                            const SensorSet& sensors);

}  // namespace sentinel
