#include "sentinel/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sentinel {

namespace {

// One CSV field as a finite double; from_chars keeps this locale-free.
double parse_field(std::string_view field, std::size_t line_no, const char* column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw parse_error(line_no, std::string("field '") + column + "': not a number: '" +
                                   std::string(field) + "'");
  if (!std::isfinite(value))
    throw parse_error(line_no, std::string("field '") + column + "': non-finite value");
  return value;
}

constexpr const char* kColumns[10] = {"t",     "acc_x", "acc_y", "acc_z", "ori_x",
                                      "ori_y", "ori_z", "mag_x", "mag_y", "mag_z"};

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw error("cannot open file: " + file.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw error("cannot write file: " + file.string());
  out << text;
  if (!out) throw error("write failed: " + file.string());
}

}  // namespace

Trace parse_trace(std::string_view text, const std::string& user_id, double native_rate_hz) {
  if (user_id.empty()) throw error("parse_trace: empty user_id");
  if (!(native_rate_hz > 0.0)) throw error("parse_trace: native_rate_hz must be positive");

  Trace trace;
  trace.user_id = user_id;
  trace.native_rate_hz = native_rate_hz;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  double prev_t = -1.0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        (eol == std::string_view::npos) ? text.substr(pos) : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;

    if (line_no == 1) {
      if (line != kTraceCsvHeader)
        throw parse_error(1, "expected header '" + std::string(kTraceCsvHeader) + "'");
      continue;
    }
    if (line.empty()) {
      if (pos > text.size()) break;  // trailing newline
      throw parse_error(line_no, "blank line");
    }

    std::array<double, 10> fields{};
    std::size_t field_idx = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (field_idx >= 10)
          throw parse_error(line_no, "expected 10 fields, got more");
        fields[field_idx] =
            parse_field(line.substr(start, i - start), line_no, kColumns[field_idx]);
        ++field_idx;
        start = i + 1;
      }
    }
    if (field_idx != 10)
      throw parse_error(line_no,
                        "expected 10 fields, got " + std::to_string(field_idx));

    SensorSample s;
    s.t = fields[0];
    s.acc = {fields[1], fields[2], fields[3]};
    s.ori = {fields[4], fields[5], fields[6]};
    s.mag = {fields[7], fields[8], fields[9]};
    if (s.t < 0.0) throw parse_error(line_no, "negative timestamp");
    if (s.t <= prev_t)
      throw parse_error(line_no, "timestamp not increasing (" + format_value(s.t) +
                                     " <= " + format_value(prev_t) + ")");
    prev_t = s.t;
    trace.samples.push_back(s);
  }
  return trace;
}

Trace load_trace(const std::filesystem::path& file, const std::string& user_id,
                 double native_rate_hz) {
  try {
    return parse_trace(read_file(file), user_id, native_rate_hz);
  } catch (const parse_error& e) {
    throw parse_error(e.line, file.string() + ": " + e.what());
  }
}

std::string write_trace(const Trace& trace) {
  validate_trace(trace);
  std::string out(kTraceCsvHeader);
  out += '\n';
  for (const SensorSample& s : trace.samples) {
    const std::array<double, 9> row = flatten(s);
    out += format_value(s.t);
    for (double v : row) {
      out += ',';
      out += format_value(v);
    }
    out += '\n';
  }
  return out;
}

void save_trace(const Trace& trace, const std::filesystem::path& file) {
  write_file(file, write_trace(trace));
}

DatasetManifest load_manifest(const std::filesystem::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw error("manifest " + file.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.root = file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
  try {
    m.native_rate_hz = j.at("native_rate_hz").get<double>();
    for (const auto& u : j.at("users")) {
      ManifestEntry entry;
      entry.id = u.at("id").get<std::string>();
      entry.path = u.at("path").get<std::string>();
      m.users.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw error("manifest " + file.string() + ": " + e.what());
  }
  if (!(m.native_rate_hz > 0.0))
    throw error("manifest " + file.string() + ": native_rate_hz must be positive");
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& file) {
  nlohmann::json j;
  j["native_rate_hz"] = manifest.native_rate_hz;
  j["users"] = nlohmann::json::array();
  for (const ManifestEntry& u : manifest.users)
    j["users"].push_back({{"id", u.id}, {"path", u.path}});
  write_file(file, j.dump(2) + "\n");
}

std::map<std::string, Trace> load_dataset(const DatasetManifest& manifest) {
  if (manifest.users.size() < 2)
    throw error("insufficient users: need at least 2 (owner plus a negative source), got " +
                std::to_string(manifest.users.size()));
  std::set<std::string> seen;
  for (const ManifestEntry& u : manifest.users)
    if (!seen.insert(u.id).second) throw error("duplicate user '" + u.id + "' in manifest");

  std::map<std::string, Trace> dataset;
  for (const ManifestEntry& u : manifest.users) {
    std::filesystem::path p(u.path);
    if (p.is_relative()) p = manifest.root / p;
    if (!std::filesystem::exists(p))
      throw error("missing trace file for user '" + u.id + "': " + p.string());
    Trace t = load_trace(p, u.id, manifest.native_rate_hz);
    validate_trace(t);
    dataset.emplace(u.id, std::move(t));
  }
  return dataset;
}

}  // namespace sentinel
