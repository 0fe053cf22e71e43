#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "anahita/core.hpp"

namespace anahita {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bracketed-section `key = value` text. `#` starts a comment. Repeated
/// keys are kept in order.
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw ParseError("line " + std::to_string(lineno) +
                           ": unterminated section header");
        }
        section = trim(line.substr(1, line.size() - 2));
        cfg.section_order_.push_back(section);
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ParseError("line " + std::to_string(lineno) +
                         ": expected `key = value`");
      }
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ParseError("line " + std::to_string(lineno) + ": empty key");
      }
      cfg.entries_.push_back({section, key, value});
    }
    return cfg;
  }

  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const {
    const Entry* found = nullptr;
    for (const auto& e : entries_) {
      if (e.section == section && e.key == key) found = &e;
    }
    if (!found) return std::nullopt;
    return found->value;
  }

  std::vector<std::string> get_all(const std::string& section,
                                   const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
      if (e.section == section && e.key == key) out.push_back(e.value);
    }
    return out;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    return parse_double(*v, section, key);
  }

  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    try {
      return std::stoull(*v);
    } catch (const std::exception&) {
      throw ParseError("[" + section + "] " + key + ": not an integer: " + *v);
    }
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw ParseError("[" + section + "] " + key + ": not a boolean: " + *v);
  }

  bool has_section(const std::string& section) const {
    for (const auto& e : entries_)
      if (e.section == section) return true;
    for (const auto& s : section_order_)
      if (s == section) return true;
    return false;
  }

  std::vector<std::string> sections() const { return section_order_; }

  void set(const std::string& section, const std::string& key,
           const std::string& value) {
    bool known = false;
    for (const auto& s : section_order_)
      if (s == section) known = true;
    if (!known) section_order_.push_back(section);
    entries_.push_back({section, key, value});
  }

  std::string serialize() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& s : section_order_) {
      if (!first) out << "\n";
      first = false;
      out << "[" << s << "]\n";
      for (const auto& e : entries_) {
        if (e.section == s) out << e.key << " = " << e.value << "\n";
      }
    }
    return out.str();
  }

  static double parse_double(const std::string& v, const std::string& section,
                             const std::string& key) {
    try {
      size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ParseError("[" + section + "] " + key + ": not a number: " + v);
    }
  }

  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

 private:
  struct Entry {
    std::string section, key, value;
  };
  std::vector<Entry> entries_;
  std::vector<std::string> section_order_;
};

inline VehicleParams load_params(const ConfigFile& cfg) {
  VehicleParams p;
  const std::string s = "vehicle";
  p.mass = cfg.get_double(s, "mass", p.mass);
  p.ballast_mass = cfg.get_double(s, "ballast_mass", p.ballast_mass);
  p.displaced_mass = cfg.get_double(s, "displaced_mass", p.displaced_mass);
  p.inertia_xx = cfg.get_double(s, "inertia_xx", p.inertia_xx);
  p.inertia_yy = cfg.get_double(s, "inertia_yy", p.inertia_yy);
  p.inertia_zz = cfg.get_double(s, "inertia_zz", p.inertia_zz);
  p.r_cg[0] = cfg.get_double(s, "cg_x", p.r_cg[0]);
  p.r_cg[1] = cfg.get_double(s, "cg_y", p.r_cg[1]);
  p.r_cg[2] = cfg.get_double(s, "cg_z", p.r_cg[2]);
  p.r_cb[0] = cfg.get_double(s, "cb_x", p.r_cb[0]);
  p.r_cb[1] = cfg.get_double(s, "cb_y", p.r_cb[1]);
  p.r_cb[2] = cfg.get_double(s, "cb_z", p.r_cb[2]);
  static const char* axes[6] = {"surge", "sway", "heave", "roll", "pitch", "yaw"};
  for (int i = 0; i < 6; ++i) {
    p.d_lin[static_cast<size_t>(i)] = cfg.get_double(
        s, std::string("d_lin_") + axes[i], p.d_lin[static_cast<size_t>(i)]);
    p.d_quad[static_cast<size_t>(i)] = cfg.get_double(
        s, std::string("d_quad_") + axes[i], p.d_quad[static_cast<size_t>(i)]);
  }
  p.l1 = cfg.get_double(s, "l1", p.l1);
  p.l2 = cfg.get_double(s, "l2", p.l2);
  p.l3 = cfg.get_double(s, "l3", p.l3);
  p.l4 = cfg.get_double(s, "l4", p.l4);
  p.t_max = cfg.get_double(s, "t_max", p.t_max);
  p.coriolis_enabled = cfg.get_bool(s, "coriolis_enabled", p.coriolis_enabled);
  p.validate();
  return p;
}

inline VehicleParams load_params(const std::string& text) {
  return load_params(ConfigFile::parse(text));
}

inline std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

inline std::string serialize_params(const VehicleParams& p) {
  ConfigFile cfg;
  const std::string s = "vehicle";
  cfg.set(s, "mass", format_double(p.mass));
  cfg.set(s, "ballast_mass", format_double(p.ballast_mass));
  cfg.set(s, "displaced_mass", format_double(p.displaced_mass));
  cfg.set(s, "inertia_xx", format_double(p.inertia_xx));
  cfg.set(s, "inertia_yy", format_double(p.inertia_yy));
  cfg.set(s, "inertia_zz", format_double(p.inertia_zz));
  cfg.set(s, "cg_x", format_double(p.r_cg[0]));
  cfg.set(s, "cg_y", format_double(p.r_cg[1]));
  cfg.set(s, "cg_z", format_double(p.r_cg[2]));
  cfg.set(s, "cb_x", format_double(p.r_cb[0]));
  cfg.set(s, "cb_y", format_double(p.r_cb[1]));
  cfg.set(s, "cb_z", format_double(p.r_cb[2]));
  static const char* axes[6] = {"surge", "sway", "heave", "roll", "pitch", "yaw"};
  for (int i = 0; i < 6; ++i) {
    cfg.set(s, std::string("d_lin_") + axes[i],
            format_double(p.d_lin[static_cast<size_t>(i)]));
    cfg.set(s, std::string("d_quad_") + axes[i],
            format_double(p.d_quad[static_cast<size_t>(i)]));
  }
  cfg.set(s, "l1", format_double(p.l1));
  cfg.set(s, "l2", format_double(p.l2));
  cfg.set(s, "l3", format_double(p.l3));
  cfg.set(s, "l4", format_double(p.l4));
  cfg.set(s, "t_max", format_double(p.t_max));
  cfg.set(s, "coriolis_enabled", p.coriolis_enabled ? "true" : "false");
  return cfg.serialize();
}

}  // namespace anahita
