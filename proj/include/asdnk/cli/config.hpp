#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asdnk/error.hpp"
#include "asdnk/fields/domain.hpp"

namespace asdnk::cli {

// One `[fixture id]` block.
struct FixtureSpec {
  std::string id;
  std::string kind;                            // nk, nk_family, dkp, ew
  std::map<std::string, std::string> values;   // remaining keys, e.g. theta, H, A
  std::vector<std::string> checks;             // must stay below tolerance
  std::vector<std::string> controls;           // must exceed the control threshold
  std::vector<std::pair<std::string, std::pair<double, double>>> domain;
  int line = 0;
  std::map<std::string, int> key_lines;        // line of each key

  int line_of(const std::string& key) const {
    auto it = key_lines.find(key);
    return it == key_lines.end() ? line : it->second;
  }

  const std::string* get(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  }
};

struct CheckConfig {
  std::string name = "suite";
  std::uint64_t seed = 1;
  std::size_t samples = 40;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> controls;
  std::vector<FixtureSpec> fixtures;
  std::string source;

  double tolerance(const std::string& check) const;
  double control(const std::string& check) const;
  const FixtureSpec& fixture(const std::string& id) const {
    for (const auto& f : fixtures)
      if (f.id == id) return f;
    throw ConfigError("no fixture '" + id + "' in " + source);
  }
};

// Default tolerances per check name.
inline const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"nk1", 1e-10},        {"nk2", 1e-10},          {"asd", 1e-8},         {"scalar", 1e-8},
      {"ricci_square", 1e-8}, {"d_sigma", 1e-9},       {"lax", 1e-8},         {"two_path", 1e-6},
      {"heqn", 1e-6},        {"lindkp", 1e-6},        {"monopole", 1e-6},    {"ew", 1e-6},
      {"jones_tod", 1e-8},   {"ricci", 1e-7},         {"sigma_wedge", 1e-10}, {"sigma11", 1e-8},
      {"sigma11_corrected", 1e-8}, {"hk_ricci", 1e-7}};
  return t;
}

inline constexpr double kDefaultControl = 1e-2;

inline double CheckConfig::tolerance(const std::string& check) const {
  if (auto it = tolerances.find(check); it != tolerances.end()) return it->second;
  auto& d = default_tolerances();
  if (auto it = d.find(check); it != d.end()) return it->second;
  throw ConfigError("unknown check '" + check + "'");
}

inline double CheckConfig::control(const std::string& check) const {
  if (auto it = controls.find(check); it != controls.end()) return it->second;
  return kDefaultControl;
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_double(const std::string& v, const std::string& where) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

}  // namespace detail

// Sectioned key = value text; '#' and ';' start comments.
//   [suite]        name, seed, samples
//   [tolerances]   check = tol
//   [controls]     check = threshold
//   [fixture id]   kind, domain, expect, checks, controls, expressions
inline CheckConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  CheckConfig cfg;
  cfg.source = source;
  std::string line, section;
  FixtureSpec* fx = nullptr;
  int lineno = 0;
  auto where = [&](const std::string& key) { return source + ":" + std::to_string(lineno) + ": '" + key + "'"; };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source + ":" + std::to_string(lineno) + ": unterminated section header");
      std::string head = detail::trim(line.substr(1, line.size() - 2));
      fx = nullptr;
      if (head.rfind("fixture", 0) == 0) {
        std::string id = detail::trim(head.substr(7));
        if (id.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": fixture section needs an id");
        for (const auto& f : cfg.fixtures)
          if (f.id == id) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate fixture '" + id + "'");
        cfg.fixtures.push_back(FixtureSpec{});
        fx = &cfg.fixtures.back();
        fx->id = id;
        fx->line = lineno;
        section = "fixture";
      } else if (head == "suite" || head == "tolerances" || head == "controls") {
        section = head;
      } else {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown section [" + head + "]");
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (section.empty()) throw ConfigError(where(key) + " outside a section");
    if (section == "suite") {
      if (key == "name") cfg.name = value;
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_double(value, where(key)));
      else if (key == "samples") {
        double n = detail::parse_double(value, where(key));
        if (n < 1) throw ConfigError(where(key) + ": samples must be positive");
        cfg.samples = static_cast<std::size_t>(n);
      } else throw ConfigError(where(key) + ": unknown suite key");
    } else if (section == "tolerances" || section == "controls") {
      double v = detail::parse_double(value, where(key));
      if (!(v > 0)) throw ConfigError(where(key) + ": tolerance must be > 0");
      if (!default_tolerances().count(key)) throw ConfigError(where(key) + ": unknown check");
      (section == "tolerances" ? cfg.tolerances : cfg.controls)[key] = v;
    } else {
      fx->key_lines[key] = lineno;
      if (key == "kind") fx->kind = value;
      else if (key == "checks") fx->checks = detail::split_list(value);
      else if (key == "controls") fx->controls = detail::split_list(value);
      else if (key == "expect") {
        if (value != "valid" && value != "invalid") throw ConfigError(where(key) + ": expect must be valid or invalid");
        fx->values["expect"] = value;
      } else if (key == "domain") {
        for (const auto& part : detail::split_list(value)) {
          std::vector<std::string> bits;
          std::stringstream ss(part);
          std::string b;
          while (std::getline(ss, b, ':')) bits.push_back(detail::trim(b));
          if (bits.size() != 3) throw ConfigError(where(key) + ": want coord:lo:hi, got '" + part + "'");
          double lo = detail::parse_double(bits[1], where(key)), hi = detail::parse_double(bits[2], where(key));
          if (!(hi > lo)) throw ConfigError(where(key) + ": empty interval for '" + bits[0] + "'");
          fx->domain.push_back({bits[0], {lo, hi}});
        }
      } else fx->values[key] = value;
    }
  }
  for (auto& f : cfg.fixtures) {
    const std::string at = source + ":" + std::to_string(f.line) + ": fixture '" + f.id + "'";
    if (f.kind.empty()) throw ConfigError(at + " has no kind");
    if (f.kind != "nk" && f.kind != "nk_family" && f.kind != "dkp" && f.kind != "ew")
      throw ConfigError(source + ":" + std::to_string(f.line_of("kind")) + ": fixture '" + f.id + "': unknown kind '" +
                        f.kind + "'");
    if (f.checks.empty() && f.controls.empty()) throw ConfigError(at + " selects no checks");
    for (const auto* list : {&f.checks, &f.controls})
      for (const auto& c : *list)
        if (!default_tolerances().count(c))
          throw ConfigError(source + ":" + std::to_string(f.line_of(list == &f.checks ? "checks" : "controls")) +
                            ": fixture '" + f.id + "': unknown check '" + c + "'");
    // expect = invalid: every listed check is a negative control
    auto e = f.values.find("expect");
    if (e != f.values.end() && e->second == "invalid") {
      f.controls.insert(f.controls.end(), f.checks.begin(), f.checks.end());
      f.checks.clear();
    }
  }
  return cfg;
}

inline CheckConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace asdnk::cli
