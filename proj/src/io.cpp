// Copyright The fgmfc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fgmfc/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fgmfc {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw IoError(std::string("malformed ") + what + ": '" + s + "'");
  return v;
}

std::string node_name(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "node_%04d.csv", s);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string field_to_csv(const SpectralField& f) {
  std::string out;
  for (int i = 1; i <= f.dim(); ++i) out += "k" + std::to_string(i) + ",";
  out += "re,im\n";
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    for (int c : f.mode_at(flat).components) out += std::to_string(c) + ",";
    out += format_double(f[flat].real()) + "," + format_double(f[flat].imag()) + "\n";
  }
  return out;
}

SpectralField field_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("field CSV is empty");
  const auto header = split(line, ',');
  const int dim = static_cast<int>(header.size()) - 2;
  if (dim < 1 || header[header.size() - 2] != "re" || header.back() != "im")
    throw IoError("field CSV header must be k1,...,kd,re,im");
  for (int i = 0; i < dim; ++i)
    if (header[i] != "k" + std::to_string(i + 1)) throw IoError("field CSV header must be k1,...,kd,re,im");

  std::vector<std::pair<std::vector<int>, Complex>> rows;
  int band = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != dim + 2) throw IoError("field CSV row has the wrong arity: " + line);
    std::vector<int> k(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      k[i] = parse_number<int>(cells[i], "mode index");
      band = std::max(band, std::abs(k[i]));
    }
    rows.emplace_back(std::move(k), Complex(parse_number<double>(cells[dim], "coefficient"),
                                            parse_number<double>(cells[dim + 1], "coefficient")));
  }
  SpectralField f(dim, band);
  for (const auto& [k, v] : rows) f.set(k, v);
  return f;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field_csv(const std::string& path, const SpectralField& f) { write_text(path, field_to_csv(f)); }

SpectralField read_field_csv(const std::string& path) { return field_from_csv(read_text(path)); }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_path(const std::string& dir, const CoefficientPath& path, const std::string& config_hash) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  json manifest;
  manifest["role"] = to_string(path.role);
  manifest["dim"] = path.dim();
  manifest["band"] = path.band();
  manifest["horizon"] = path.horizon;
  manifest["steps"] = path.steps;
  json times = json::array();
  json files = json::array();
  for (int s = 0; s <= path.steps; ++s) {
    times.push_back(path.time(s));
    files.push_back(node_name(s));
    write_field_csv((fs::path(dir) / node_name(s)).string(), path.nodes[static_cast<std::size_t>(s)]);
  }
  manifest["times"] = times;
  manifest["files"] = files;
  manifest["config_hash"] = config_hash;
  write_text((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

CoefficientPath read_path(const std::string& dir) {
  json manifest;
  try {
    manifest = json::parse(read_text((fs::path(dir) / "manifest.json").string()));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  CoefficientPath out;
  out.horizon = manifest.at("horizon").get<double>();
  out.steps = manifest.at("steps").get<int>();
  const std::string role = manifest.at("role").get<std::string>();
  for (PathRole r : {PathRole::kForward, PathRole::kBackward, PathRole::kFlow, PathRole::kControl})
    if (role == to_string(r)) out.role = r;
  const int band = manifest.at("band").get<int>();
  for (const auto& name : manifest.at("files"))
    out.nodes.push_back(read_field_csv((fs::path(dir) / name.get<std::string>()).string()).with_band(band));
  if (static_cast<int>(out.nodes.size()) != out.steps + 1) throw IoError("manifest node count mismatch");
  return out;
}

std::string report_to_json(const SolveReport& r) {
  json j;
  j["picard_iterations"] = r.picard_iterations;
  j["final_residual"] = r.final_residual;
  j["min_density"] = r.min_density;
  j["min_density_truncated"] = r.min_density_truncated;
  j["cutoff_activations"] = r.cutoff_activations;
  j["probability_valued"] = r.probability_valued;
  j["truncated_probability_valued"] = r.truncated_probability_valued;
  j["final_damping"] = r.final_damping;
  j["remainder_tail_estimate"] = r.remainder_tail_estimate;
  j["residual_history"] = r.residual_history;
  j["warnings"] = r.warnings;
  return j.dump(2);
}

std::string cost_to_json(const CostBreakdown& c) {
  json j;
  j["terminal"] = c.terminal;
  j["running_F"] = c.running_F;
  j["running_L"] = c.running_L;
  j["total"] = c.total;
  j["admissible"] = c.admissible;
  j["min_density"] = c.min_density;
  return j.dump(2);
}

}  // namespace fgmfc
