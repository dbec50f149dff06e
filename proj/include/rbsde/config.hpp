#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rbsde/errors.hpp"

namespace rbsde {

/// key=value experiment configs: one pair per line, '#' comments, blank
/// lines ignored. Lookups mark keys as used so a command can reject stray
/// keys afterwards (typos must not be silently ignored).
class Config {
 public:
  static Config parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ParameterError("config line " + std::to_string(lineno) +
                             ": expected key=value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string val = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ParameterError("config line " + std::to_string(lineno) +
                             ": empty key");
      if (!cfg.kv_.emplace(key, val).second)
        throw ParameterError("config: duplicate key '" + key + "'");
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    used_.insert(key);
    return it->second;
  }

  std::string required(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end())
      throw ParameterError("config: missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  double num(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    used_.insert(key);
    return to_num(key, it->second);
  }

  int integer(const std::string& key, int dflt) const {
    const double v = num(key, static_cast<double>(dflt));
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ParameterError("config: key '" + key + "' must be an integer");
    return i;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    used_.insert(key);
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParameterError("config: key '" + key +
                           "' must be a nonnegative integer");
    }
  }

  /// Comma-separated list of numbers.
  std::vector<double> num_list(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return {};
    used_.insert(key);
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ','))
      out.push_back(to_num(key, trim(item)));
    return out;
  }

  std::vector<std::string> str_list(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return {};
    used_.insert(key);
    std::vector<std::string> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  /// Rejects keys that no lookup touched.
  void fail_on_unused() const {
    std::string stray;
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) stray += stray.empty() ? k : ", " + k;
    if (!stray.empty())
      throw ParameterError("config: unknown key(s): " + stray);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double to_num(const std::string& key, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParameterError("config: key '" + key + "' has a non-numeric value '" +
                           s + "'");
    }
  }

  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> used_;
};

}  // namespace rbsde
