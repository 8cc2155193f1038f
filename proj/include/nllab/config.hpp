// Flat "[section] key = value" configuration for the lab driver.
#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "nllab/error.hpp"
#include "nllab/experiments.hpp"
#include "nllab/numfmt.hpp"

namespace nllab {

struct LabConfig {
  std::string output_dir = "runs";
  // Used only by the random-field property tests.
  std::uint64_t seed = 20240611;
  Ce1Config ce1;
  Ce2Config ce2;
  Ce3Config ce3;
  RateConfig rate;
  ViscConfig visc;
  ConvergenceConfig convergence;
};

class ConfigError : public LabError {
 public:
  using LabError::LabError;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline bool parse_real(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && std::isfinite(out);
}

template <class Int>
inline bool parse_int(const std::string& s, Int& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

inline std::vector<std::string> split_list(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && ((s.front() == '[' && s.back() == ']') || (s.front() == '{' && s.back() == '}'))) {
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

// One configurable key: parses a value string into the config, prints it back.
struct Entry {
  std::string key;
  std::string type;  // for error messages
  std::function<bool(LabConfig&, const std::string&)> set;
  std::function<std::string(const LabConfig&)> get;
};

template <class T>
Entry real_entry(std::string key, T member) {
  return {key, "a real number",
          [member](LabConfig& c, const std::string& v) { return parse_real(v, member(c)); },
          [member](const LabConfig& c) { return format_double(member(c)); }};
}

template <class T>
Entry int_entry(std::string key, T member) {
  return {key, "an integer",
          [member](LabConfig& c, const std::string& v) { return parse_int(v, member(c)); },
          [member](const LabConfig& c) { return std::to_string(member(c)); }};
}

template <class T>
Entry string_entry(std::string key, T member) {
  return {key, "a string",
          [member](LabConfig& c, const std::string& v) {
            if (v.empty()) return false;
            member(c) = v;
            return true;
          },
          [member](const LabConfig& c) { return member(c); }};
}

template <class T>
Entry real_list_entry(std::string key, T member) {
  return {key, "a comma-separated list of real numbers",
          [member](LabConfig& c, const std::string& v) {
            std::vector<double> out;
            for (const auto& item : split_list(v)) {
              double x;
              if (!parse_real(item, x)) return false;
              out.push_back(x);
            }
            if (out.empty()) return false;
            member(c) = out;
            return true;
          },
          [member](const LabConfig& c) {
            std::string s;
            for (double x : member(c)) s += (s.empty() ? "" : ", ") + format_double(x);
            return s;
          }};
}

template <class T>
Entry int_list_entry(std::string key, T member) {
  return {key, "a comma-separated list of integers",
          [member](LabConfig& c, const std::string& v) {
            std::vector<int> out;
            for (const auto& item : split_list(v)) {
              int x;
              if (!parse_int(item, x)) return false;
              out.push_back(x);
            }
            if (out.empty()) return false;
            member(c) = out;
            return true;
          },
          [member](const LabConfig& c) {
            std::string s;
            for (int x : member(c)) s += (s.empty() ? "" : ", ") + std::to_string(x);
            return s;
          }};
}

#define NLLAB_FIELD(path) [](auto& c) -> auto& { return c.path; }

struct Section {
  std::string name;
  std::vector<Entry> entries;
  std::function<void(const LabConfig&)> validate;
};

inline const std::vector<Section>& sections() {
  static const std::vector<Section> all = {
      {"lab",
       {string_entry("output_dir", NLLAB_FIELD(output_dir)), int_entry("seed", NLLAB_FIELD(seed))},
       [](const LabConfig&) {}},
      {"ce1",
       {real_entry("epsilon", NLLAB_FIELD(ce1.epsilon)), int_entry("particles", NLLAB_FIELD(ce1.particles)),
        int_entry("godunov_cells", NLLAB_FIELD(ce1.godunov_cells)), real_entry("t_end", NLLAB_FIELD(ce1.t_end)),
        string_entry("solver", NLLAB_FIELD(ce1.solver))},
       [](const LabConfig& c) { validate(c.ce1); }},
      {"ce2",
       {real_entry("epsilon", NLLAB_FIELD(ce2.epsilon)), int_entry("particles", NLLAB_FIELD(ce2.particles)),
        int_entry("godunov_cells", NLLAB_FIELD(ce2.godunov_cells)), real_entry("t_end", NLLAB_FIELD(ce2.t_end)),
        real_entry("t_baricenter", NLLAB_FIELD(ce2.t_baricenter)), string_entry("solver", NLLAB_FIELD(ce2.solver))},
       [](const LabConfig& c) { validate(c.ce2); }},
      {"ce3",
       {real_entry("epsilon", NLLAB_FIELD(ce3.epsilon)), int_entry("particles", NLLAB_FIELD(ce3.particles)),
        int_entry("godunov_cells", NLLAB_FIELD(ce3.godunov_cells)), real_entry("t_end", NLLAB_FIELD(ce3.t_end)),
        int_entry("fv_refinement", NLLAB_FIELD(ce3.fv_refinement)), string_entry("solver", NLLAB_FIELD(ce3.solver))},
       [](const LabConfig& c) { validate(c.ce3); }},
      {"rate",
       {real_entry("nu", NLLAB_FIELD(rate.nu)), real_entry("p", NLLAB_FIELD(rate.p)),
        real_list_entry("eps_list", NLLAB_FIELD(rate.eps_list)), string_entry("kernel", NLLAB_FIELD(rate.kernel)),
        int_entry("dx_refinement", NLLAB_FIELD(rate.dx_refinement)), real_entry("t_end", NLLAB_FIELD(rate.t_end)),
        real_entry("output_every", NLLAB_FIELD(rate.output_every)), real_entry("mass", NLLAB_FIELD(rate.mass)),
        real_entry("width", NLLAB_FIELD(rate.width))},
       [](const LabConfig& c) { validate(c.rate); }},
      {"visc",
       {real_entry("epsilon", NLLAB_FIELD(visc.epsilon)), real_list_entry("nu_list", NLLAB_FIELD(visc.nu_list)),
        real_entry("dx", NLLAB_FIELD(visc.dx)), real_entry("t_end", NLLAB_FIELD(visc.t_end)),
        real_entry("mass", NLLAB_FIELD(visc.mass)), real_entry("width", NLLAB_FIELD(visc.width)),
        real_list_entry("local_nu_list", NLLAB_FIELD(visc.local_nu_list))},
       [](const LabConfig& c) { validate(c.visc); }},
      {"convergence",
       {int_list_entry("cells", NLLAB_FIELD(convergence.cells)), real_entry("t_end", NLLAB_FIELD(convergence.t_end))},
       [](const LabConfig& c) { validate(c.convergence); }},
  };
  return all;
}

#undef NLLAB_FIELD

inline const Section* find_section(const std::string& name) {
  for (const auto& s : sections()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

// Key a validation message is about: the longest key of the section that
// starts the message.
inline const std::string* blamed_key(const Section& s, const std::string& message) {
  const std::string* best = nullptr;
  for (const auto& e : s.entries) {
    if (message.rfind(e.key, 0) == 0 && (!best || e.key.size() > best->size())) best = &e.key;
  }
  return best;
}

}  // namespace detail

/// Parses configuration text; keys before the first section header belong to [lab].
inline LabConfig parse_config(const std::string& text) {
  LabConfig cfg;
  std::string section = "lab";
  std::map<std::string, std::map<std::string, int>> lines;  // section -> key -> line
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!detail::find_section(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key before '='");
    const detail::Section& sec = *detail::find_section(section);
    const detail::Entry* entry = nullptr;
    for (const auto& e : sec.entries) {
      if (e.key == key) entry = &e;
    }
    if (!entry) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(where + "key '" + key + "' is missing a value");
    if (lines[section].count(key)) {
      throw ConfigError(where + "duplicate key '" + key + "' in [" + section + "] (first set on line " +
                        std::to_string(lines[section][key]) + ")");
    }
    if (!entry->set(cfg, value)) {
      throw ConfigError(where + "key '" + key + "' expects " + entry->type + ", got '" + value + "'");
    }
    lines[section][key] = line_no;
  }
  for (const auto& sec : detail::sections()) {
    try {
      sec.validate(cfg);
    } catch (const ConfigError&) {
      throw;
    } catch (const LabError& e) {
      const std::string msg = e.what();
      const std::string* key = detail::blamed_key(sec, msg);
      std::string where;
      if (key && lines[sec.name].count(*key)) where = "line " + std::to_string(lines[sec.name][*key]) + ": ";
      throw ConfigError(where + "[" + sec.name + "] " + msg);
    }
  }
  return cfg;
}

/// Fully resolved configuration text; parse_config(to_text(c)) reproduces c.
inline std::string to_text(const LabConfig& cfg) {
  std::string out;
  for (const auto& sec : detail::sections()) {
    out += "[" + sec.name + "]\n";
    for (const auto& e : sec.entries) out += e.key + " = " + e.get(cfg) + "\n";
    out += "\n";
  }
  return out;
}

inline nlohmann::json to_json(const LabConfig& cfg) {
  return {{"output_dir", cfg.output_dir}, {"seed", cfg.seed},
          {"ce1", to_json(cfg.ce1)},      {"ce2", to_json(cfg.ce2)},
          {"ce3", to_json(cfg.ce3)},      {"rate", to_json(cfg.rate)},
          {"visc", to_json(cfg.visc)},    {"convergence", to_json(cfg.convergence)}};
}

}  // namespace nllab
