#pragma once

// Flat key=value configuration files: one parameter per line, '#' starts a
// comment, blank lines are ignored.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dfsim/protocol.hpp"

namespace dfsim {

class KeyValues {
 public:
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> text(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  /// Comma-separated numbers.
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;

  /// Throws ConfigError naming every key that was never read.
  void require_all_used() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// Reads every experiment parameter present; missing keys keep their
/// defaults. Throws ConfigError on malformed values or an invalid result.
ExperimentConfig experiment_from(const KeyValues& kv);

}  // namespace dfsim
