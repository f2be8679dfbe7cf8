#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/core.hpp"

namespace sentinel {

/// Column header of the trace CSV format.
inline constexpr std::string_view kTraceCsvHeader =
    "t,acc_x,acc_y,acc_z,ori_x,ori_y,ori_z,mag_x,mag_y,mag_z";

/// Parses a trace CSV (header line + one row per sample). Every error is a
/// parse_error naming the offending 1-based line.
Trace parse_trace(std::string_view text, const std::string& user_id, double native_rate_hz);

Trace load_trace(const std::filesystem::path& file, const std::string& user_id,
                 double native_rate_hz);

/// Serializes to the trace CSV format with 9 significant digits, so
/// parse_trace(write_trace(t)) reproduces t up to that precision.
std::string write_trace(const Trace& trace);

void save_trace(const Trace& trace, const std::filesystem::path& file);

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to the manifest's directory unless absolute
};

/// On-disk dataset layout: a JSON manifest listing per-user trace files.
struct DatasetManifest {
  std::filesystem::path root;  // directory the user paths are resolved against
  double native_rate_hz = 0.0;
  std::vector<ManifestEntry> users;
};

/// Reads {"native_rate_hz": number, "users": [{"id": ..., "path": ...}]}.
DatasetManifest load_manifest(const std::filesystem::path& file);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& file);

/// Loads every listed trace. Requires >= 2 users (owner plus at least one
/// negative source) and unique user ids; missing files are reported by path.
std::map<std::string, Trace> load_dataset(const DatasetManifest& manifest);

}  // namespace sentinel
