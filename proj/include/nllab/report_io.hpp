// Run directories: manifest.json, diagnostics.csv and fields/*.csv per scenario report.
#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nllab/core_fields.hpp"
#include "nllab/diagnostics.hpp"
#include "nllab/error.hpp"
#include "nllab/experiments.hpp"
#include "nllab/numfmt.hpp"

namespace nllab {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Stable identity of a run: scenario, resolved configuration and code version.
inline std::string manifest_hash(const ScenarioReport& r) {
  const std::string key = r.scenario + "\n" + r.config.dump() + "\n" + kCodeVersion;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  return buf;
}

inline std::string run_directory_name(const ScenarioReport& r) {
  return r.scenario + "-" + manifest_hash(r);
}

// One table for all series of a report: "run,t,<standard channels>".
inline void write_diagnostics_csv(std::ostream& os, const ScenarioReport& r) {
  const auto& names = standard_channels();
  os << "run,t";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  for (const auto& [label, series] : r.series) {
    for (std::size_t k = 0; k < series.size(); ++k) {
      os << label << ',' << format_double(series.times()[k]);
      for (const auto& n : names) {
        os << ',' << (series.has(n) ? format_double(series.channel(n)[k]) : std::string("nan"));
      }
      os << '\n';
    }
  }
}

struct EmittedPaths {
  std::filesystem::path directory;
  std::filesystem::path manifest;
  std::filesystem::path diagnostics;
  std::vector<std::filesystem::path> fields;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LabError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw LabError("write failed for '" + path.string() + "'");
}

inline std::string safe_label(const std::string& label) {
  std::string s = label;
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '=')) c = '_';
  }
  return s;
}

}  // namespace detail

/// Writes the report into root/<scenario>-<hash>/. CSVs are byte-identical for
/// identical inputs; the manifest additionally records the wall time.
inline EmittedPaths emit_report(const ScenarioReport& r, const std::filesystem::path& root) {
  EmittedPaths p;
  p.directory = root / run_directory_name(r);
  std::error_code ec;
  std::filesystem::create_directories(p.directory / "fields", ec);
  if (ec) throw LabError("cannot create '" + (p.directory / "fields").string() + "': " + ec.message());

  p.diagnostics = p.directory / "diagnostics.csv";
  std::ostringstream diag;
  write_diagnostics_csv(diag, r);
  detail::write_file(p.diagnostics, diag.str());

  for (const auto& [label, field] : r.fields) {
    const auto path = p.directory / "fields" / (detail::safe_label(label) + ".csv");
    std::ostringstream os;
    write_csv(os, field);
    detail::write_file(path, os.str());
    p.fields.push_back(path);
  }

  nlohmann::json m = to_json(r);
  m["code_version"] = kCodeVersion;
  m["manifest_hash"] = manifest_hash(r);
  m["wall_seconds"] = r.wall_seconds;
  m["files"] = {{"diagnostics", "diagnostics.csv"}, {"fields", nlohmann::json::array()}};
  for (const auto& f : p.fields) m["files"]["fields"].push_back("fields/" + f.filename().string());
  p.manifest = p.directory / "manifest.json";
  detail::write_file(p.manifest, m.dump(2) + "\n");
  return p;
}

}  // namespace nllab
