#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "luca/common.hpp"

namespace luca {

// Flat key=value run configuration. File values are overridden by CLI flags;
// every numeric read is range-checked at access time.
class RunConfig {
 public:
  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  long get_int(const std::string& key, long fallback, long lo, long hi) const;
  double get_double(const std::string& key, double fallback, double lo, double hi) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // comma-separated doubles
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  // comma-separated tokens
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  // "1:16" -> 16.0 (max rate with min fixed at 1)
  static double parse_ratio(const std::string& token);

  // canonical text rendering, keys sorted
  std::string to_text() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace luca
