#include "sentinel/core.hpp"

#include <cmath>
#include <sstream>

namespace sentinel {

std::array<double, 9> flatten(const SensorSample& s) {
  return {s.acc[0], s.acc[1], s.acc[2], s.ori[0], s.ori[1], s.ori[2],
          s.mag[0], s.mag[1], s.mag[2]};
}

bool all_finite(const SensorSample& s) {
  if (!std::isfinite(s.t)) return false;
  for (double v : flatten(s))
    if (!std::isfinite(v)) return false;
  return true;
}

double Trace::duration_s() const {
  if (samples.size() < 2) return 0.0;
  return samples.back().t - samples.front().t;
}

void validate_trace(const Trace& trace) {
  if (trace.user_id.empty()) throw error("trace has empty user_id");
  if (!(trace.native_rate_hz > 0.0) || !std::isfinite(trace.native_rate_hz))
    throw error("trace '" + trace.user_id + "': native_rate_hz must be positive");
  double prev = -1.0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const SensorSample& s = trace.samples[i];
    if (!all_finite(s))
      throw error("trace '" + trace.user_id + "': non-finite value at sample " +
                  std::to_string(i));
    if (s.t < 0.0)
      throw error("trace '" + trace.user_id + "': negative timestamp at sample " +
                  std::to_string(i));
    if (i > 0 && s.t <= prev)
      throw error("trace '" + trace.user_id + "': timestamps not strictly increasing at sample " +
                  std::to_string(i));
    prev = s.t;
  }
}

Trace truncate_trace(const Trace& trace, double cutoff_s) {
  Trace out;
  out.user_id = trace.user_id;
  out.native_rate_hz = trace.native_rate_hz;
  for (const SensorSample& s : trace.samples) {
    if (s.t >= cutoff_s) break;
    out.samples.push_back(s);
  }
  return out;
}

SensorSet::SensorSet(bool acc, bool ori, bool mag) : acc_(acc), ori_(ori), mag_(mag) {
  if (!acc && !ori && !mag) throw error("sensor set must enable at least one sensor");
}

SensorSet SensorSet::parse(const std::string& text) {
  bool acc = false, ori = false, mag = false;
  std::string token;
  std::istringstream in(text);
  std::string normalized = text;
  for (char& c : normalized)
    if (c == '+') c = ',';
  std::istringstream stream(normalized);
  while (std::getline(stream, token, ',')) {
    // trim spaces
    std::size_t b = token.find_first_not_of(" \t");
    std::size_t e = token.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    token = token.substr(b, e - b + 1);
    if (token == "acc")
      acc = true;
    else if (token == "ori")
      ori = true;
    else if (token == "mag")
      mag = true;
    else
      throw error("unknown sensor '" + token + "' (expected acc, ori or mag)");
  }
  if (!acc && !ori && !mag) throw error("sensor set '" + text + "' enables no sensor");
  return SensorSet(acc, ori, mag);
}

std::size_t SensorSet::dimension() const {
  return 3u * (static_cast<std::size_t>(acc_) + static_cast<std::size_t>(ori_) +
               static_cast<std::size_t>(mag_));
}

std::string SensorSet::to_string() const {
  std::string out;
  auto append = [&out](const char* name) {
    if (!out.empty()) out += '+';
    out += name;
  };
  if (acc_) append("acc");
  if (ori_) append("ori");
  if (mag_) append("mag");
  return out;
}

std::vector<SensorSet> SensorSet::all_combinations() {
  return {SensorSet(true, false, false),  SensorSet(false, true, false),
          SensorSet(false, false, true),  SensorSet(true, true, false),
          SensorSet(true, false, true),   SensorSet(false, true, true),
          SensorSet(true, true, true)};
}

FeatureVector project(const FeatureVector& v, const SensorSet& sensors) {
  if (v.values.size() != 9)
    throw error("project: expected a 9-dim vector, got dimension " +
                std::to_string(v.values.size()));
  FeatureVector out;
  out.label = v.label;
  out.values.reserve(sensors.dimension());
  if (sensors.acc())
    out.values.insert(out.values.end(), v.values.begin(), v.values.begin() + 3);
  if (sensors.ori())
    out.values.insert(out.values.end(), v.values.begin() + 3, v.values.begin() + 6);
  if (sensors.mag())
    out.values.insert(out.values.end(), v.values.begin() + 6, v.values.begin() + 9);
  return out;
}

}  // namespace sentinel
