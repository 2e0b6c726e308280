#pragma once

// Flat `key = value` run configuration. Lines starting with '#' and blank
// lines are ignored; a key may appear once per source. Getters record which
// keys were read so that a misspelt key is reported instead of ignored.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fkrc/error.hpp"
#include "fkrc/lattice.hpp"

namespace fkrc {

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what) : Error(ErrorCode::InvalidConfig, what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

class RunConfig {
 public:
  static RunConfig parse(const std::string& text, const std::string& source = "config") {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    for (int no = 1; std::getline(in, line); ++no) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string where = source + ":" + std::to_string(no);
      if (eq == std::string::npos) throw ConfigError("", where + ": expected `key = value`");
      const auto key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("", where + ": empty key");
      if (cfg.values_.count(key)) throw ConfigError(key, where + ": duplicate key");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  /// Overrides (or adds) a key.
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string str(const std::string& key) const { return raw(key); }
  std::string str(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
  }

  double real(const std::string& key, double lo = -std::numeric_limits<double>::infinity(),
              double hi = std::numeric_limits<double>::infinity()) const {
    return check_range(key, to_real(key, raw(key)), lo, hi);
  }
  double real(const std::string& key, double fallback, double lo, double hi) const {
    return has(key) ? real(key, lo, hi) : fallback;
  }

  long long integer(const std::string& key, long long lo = std::numeric_limits<long long>::min(),
                    long long hi = std::numeric_limits<long long>::max()) const {
    const auto v = to_integer(key, raw(key));
    check_range(key, static_cast<double>(v), static_cast<double>(lo), static_cast<double>(hi));
    return v;
  }
  long long integer(const std::string& key, long long fallback, long long lo, long long hi) const {
    return has(key) ? integer(key, lo, hi) : fallback;
  }

  std::uint64_t u64(const std::string& key) const {
    const auto s = raw(key);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key, key + ": not an unsigned integer: " + s);
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto s = raw(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, key + ": expected true or false, got " + s);
  }

  /// "4,8,12" or a range "4..16" (step 1) or "8..40:4".
  std::vector<int> int_list(const std::string& key) const {
    const auto s = raw(key);
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
      const auto colon = s.find(':', dots);
      const int a = static_cast<int>(to_integer(key, detail::trim(s.substr(0, dots))));
      const int b = static_cast<int>(to_integer(key, detail::trim(s.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2))));
      const int step = colon == std::string::npos ? 1 : static_cast<int>(to_integer(key, detail::trim(s.substr(colon + 1))));
      if (step < 1 || b < a) throw ConfigError(key, key + ": bad range " + s);
      for (int v = a; v <= b; v += step) out.push_back(v);
      return out;
    }
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(static_cast<int>(to_integer(key, detail::trim(item))));
    if (out.empty()) throw ConfigError(key, key + ": empty list");
    return out;
  }

  std::vector<double> real_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key));
    for (std::string item; std::getline(ss, item, ',');) out.push_back(to_real(key, detail::trim(item)));
    if (out.empty()) throw ConfigError(key, key + ": empty list");
    return out;
  }

  /// Lattice vector "(1,0)" or "1,0".
  Site site(const std::string& key) const {
    auto s = raw(key);
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '(' || c == ')' || c == ' '; }), s.end());
    std::vector<int> c;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) c.push_back(static_cast<int>(to_integer(key, item)));
    if (c.empty() || c.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError(key, key + ": bad vector " + raw(key));
    Site out = Site::zero(static_cast<int>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) out[static_cast<int>(i)] = c[i];
    return out;
  }

  /// Semicolon-separated lattice vectors "(1,0);(2,1)".
  std::vector<Site> site_list(const std::string& key) const {
    std::vector<Site> out;
    std::stringstream ss(raw(key));
    for (std::string item; std::getline(ss, item, ';');) {
      RunConfig one;
      one.set(key, item);
      out.push_back(one.site(key));
    }
    if (out.empty()) throw ConfigError(key, key + ": empty list");
    return out;
  }

  /// One of `choices`.
  std::string choice(const std::string& key, const std::vector<std::string>& choices) const {
    const auto s = raw(key);
    if (std::find(choices.begin(), choices.end(), s) == choices.end()) {
      std::string all;
      for (const auto& c : choices) all += (all.empty() ? "" : "|") + c;
      throw ConfigError(key, key + ": expected " + all + ", got " + s);
    }
    return s;
  }
  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& choices) const {
    return has(key) ? choice(key, choices) : fallback;
  }

  /// Throws on the first key nothing has read.
  void reject_unused() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ConfigError(k, k + ": unknown key for this command");
  }

  /// Sorted `key = value` lines.
  std::string echo() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, key + ": required key is missing");
    used_.insert(key);
    return it->second;
  }

  static double to_real(const std::string& key, const std::string& s) {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
      throw ConfigError(key, key + ": not a number: " + s);
    return v;
  }

  static long long to_integer(const std::string& key, const std::string& s) {
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(key, key + ": not an integer: " + s);
    return v;
  }

  static double check_range(const std::string& key, double v, double lo, double hi) {
    if (v < lo || v > hi) {
      std::ostringstream os;
      os << key << ": " << v << " outside [" << lo << ", " << hi << "]";
      throw ConfigError(key, os.str());
    }
    return v;
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace fkrc
