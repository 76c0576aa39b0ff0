#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lrpgd/core.hpp"

namespace lrpgd::experiment {

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

inline long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    // Accept integral values written in floating notation, e.g. 1e3.
    const double d = parse_double(key, text);
    if (d != static_cast<double>(static_cast<long long>(d)))
      throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    return static_cast<long long>(d);
  }
  return v;
}

}  // namespace detail

/// Flat key = value configuration. Lines starting with '#' are comments.
class Config {
 public:
  Config() = default;

  static Config parse(std::istream& in, const std::string& origin = "<config>") {
    Config c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (detail::trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = detail::trim(std::string_view(line).substr(0, eq));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      c.values_[key] = detail::trim(std::string_view(line).substr(eq + 1));
    }
    return c;
  }

  static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
    std::istringstream in(text);
    return parse(in, origin);
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in, path);
  }

  /// Applies "key=value".
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
    set(detail::trim(std::string_view(assignment).substr(0, eq)),
        detail::trim(std::string_view(assignment).substr(eq + 1)));
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void erase(const std::string& key) { values_.erase(key); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Later values win.
  void merge(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  std::string str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double num(const std::string& key) const { return detail::parse_double(key, str(key)); }
  double num(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
  }
  long long integer(const std::string& key) const { return detail::parse_int(key, str(key)); }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    std::uint64_t v = 0;
    const std::string text = str(key);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ConfigError("config key '" + key + "': expected an unsigned integer");
    return v;
  }
  std::vector<std::string> list(const std::string& key) const {
    return detail::split_list(str(key));
  }

  /// Keys with the given prefix, prefix stripped, in sorted order.
  std::map<std::string, std::string> with_prefix(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    for (auto it = values_.lower_bound(prefix); it != values_.end(); ++it) {
      if (it->first.compare(0, prefix.size(), prefix) != 0) break;
      out[it->first.substr(prefix.size())] = it->second;
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  /// "key = value" lines in sorted key order; independent of insertion order.
  std::string canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

  /// FNV-1a over the canonical form.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

}  // namespace lrpgd::experiment
