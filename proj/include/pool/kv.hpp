#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pool {

/// Malformed or inconsistent configuration input. The CLI maps it to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed "key = value" text with an optional trailing "grid:" block.
///
///   # comment
///   max_steps = 120
///   grid:
///   #..N..F
///
/// Keys are case-sensitive; blank lines and '#'-prefixed lines in the header
/// are ignored. Everything after "grid:" is taken verbatim (one row per line,
/// trailing blank lines dropped).
class KeyValueText {
 public:
  static KeyValueText parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueText load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::vector<std::string>& grid() const { return grid_; }
  const std::string& origin() const { return origin_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::uint64_t> get_u64s(const std::string& key,
                                      std::vector<std::uint64_t> fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Keys not in the allowed list, for typo detection.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> grid_;
  std::string origin_;
};

double parse_double(const std::string& text, const std::string& what);
std::int64_t parse_int(const std::string& text, const std::string& what);
std::vector<std::string> split_list(const std::string& text);

}  // namespace pool
