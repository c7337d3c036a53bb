#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rcs {

// Flat key=value configuration file: one pair per line, '#' starts a
// comment, blank lines ignored. Values keep their raw text; typed access
// validates on demand and reports the offending line.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static ConfigFile parse_text(const std::string& text, const std::string& origin = "<memory>");
  static ConfigFile parse_file(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // "auto" (or absence) -> nullopt; otherwise the parsed number.
  std::optional<double> get_auto_double(const std::string& key) const;

  std::vector<int> get_int_list(const std::string& key) const;

  // Either an explicit comma list of values or "log:<lo>:<hi>:<count>".
  std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;

  // Rejects any key outside `allowed`, naming the key and its line.
  void require_known_keys(const std::vector<std::string>& allowed) const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;
  std::map<std::string, Entry> entries_;
  std::string origin_;
};

std::vector<double> log_spaced_grid(double lo, double hi, int count);

}  // namespace rcs
