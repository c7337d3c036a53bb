#include "rcs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw SpecError(origin + ": expected key=value at line " + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw SpecError(origin + ": empty key at line " + std::to_string(lineno));
    }
    if (cfg.entries_.count(key)) {
      throw SpecError(origin + ": duplicate key '" + key + "' at line " + std::to_string(lineno));
    }
    cfg.entries_[key] = Entry{value, lineno};
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

void ConfigFile::fail(const std::string& key, const std::string& msg) const {
  const auto it = entries_.find(key);
  const int line = it == entries_.end() ? 0 : it->second.line;
  throw SpecError(origin_ + ": key '" + key + "' at line " + std::to_string(line) + ": " + msg);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(key, "expected a number, got '" + it->second.value + "'");
  }
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(key, "expected an integer, got '" + it->second.value + "'");
  }
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second.value, &pos);
    if (pos != it->second.value.size()) throw std::invalid_argument("");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    fail(key, "expected an unsigned integer, got '" + it->second.value + "'");
  }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second.value;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(key, "expected a boolean, got '" + v + "'");
}

std::optional<double> ConfigFile::get_auto_double(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.value == "auto") return std::nullopt;
  return get_double(key, 0.0);
}

std::vector<int> ConfigFile::get_int_list(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return {};
  std::vector<int> out;
  for (const std::string& tok : split(it->second.value, ',')) {
    const std::string t = trim(tok);
    if (t.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(t, &pos));
      if (pos != t.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail(key, "expected a comma-separated integer list");
    }
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::vector<double> log_spaced_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 1) {
    throw SpecError("grid: need 0 < lo < hi and count >= 1");
  }
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    g[i] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
  }
  return g;
}

std::vector<double> ConfigFile::get_grid(const std::string& key,
                                         const std::vector<double>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second.value;
  if (v.rfind("log:", 0) == 0) {
    const auto parts = split(v.substr(4), ':');
    if (parts.size() != 3) fail(key, "expected log:<lo>:<hi>:<count>");
    try {
      return log_spaced_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
    } catch (const SpecError&) {
      throw;
    } catch (const std::exception&) {
      fail(key, "expected log:<lo>:<hi>:<count>");
    }
  }
  std::vector<double> out;
  for (const std::string& tok : split(v, ',')) {
    const std::string t = trim(tok);
    if (t.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(t, &pos));
      if (pos != t.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      fail(key, "expected a comma-separated number list");
    }
  }
  if (out.empty()) fail(key, "empty grid");
  for (double g : out) {
    if (!(g > 0.0)) fail(key, "grid values must be positive");
  }
  return out;
}

void ConfigFile::require_known_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [key, entry] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SpecError(origin_ + ": unknown key '" + key + "' at line " +
                      std::to_string(entry.line));
    }
  }
}

}  // namespace rcs
