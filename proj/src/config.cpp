#include "luca/config.hpp"

#include <fstream>
#include <sstream>

namespace luca {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value: " + line);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key on config line " + std::to_string(lineno));
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
  return it->second;
}

long RunConfig::get_int(const std::string& key, long fallback, long lo, long hi) const {
  auto it = values_.find(key);
  long v = fallback;
  if (it != values_.end()) {
    try {
      std::size_t used = 0;
      v = std::stol(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
    }
  }
  if (v < lo || v > hi)
    throw ConfigError("config key '" + key + "' = " + std::to_string(v) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

double RunConfig::get_double(const std::string& key, double fallback, double lo, double hi) const {
  auto it = values_.find(key);
  double v = fallback;
  if (it != values_.end()) {
    try {
      std::size_t used = 0;
      v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    }
  }
  if (!(v >= lo && v <= hi))
    throw ConfigError("config key '" + key + "' = " + format_double(v) + " outside [" +
                      format_double(lo) + ", " + format_double(hi) + "]");
  return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + it->second);
}

std::vector<std::string> RunConfig::get_list(const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::string> out;
  std::istringstream in(it->second);
  std::string token;
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(token);
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
  return out;
}

std::vector<double> RunConfig::get_double_list(const std::string& key,
                                               const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& token : get_list(key, {})) {
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has non-numeric entry: " + token);
    }
  }
  return out;
}

double RunConfig::parse_ratio(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) {
    try {
      return std::stod(token);
    } catch (const std::exception&) {
      throw ConfigError("bad emission ratio '" + token + "' (expected 1:N or a number)");
    }
  }
  double lo = 0.0, hi = 0.0;
  try {
    lo = std::stod(token.substr(0, colon));
    hi = std::stod(token.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad emission ratio '" + token + "'");
  }
  if (lo != 1.0) throw ConfigError("emission ratios are expressed as 1:N (got '" + token + "')");
  if (!(hi >= 1.0)) throw ConfigError("emission ratio max must be >= 1");
  return hi;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
  return out.str();
}

}  // namespace luca
