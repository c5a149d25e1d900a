#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace luca {

using Time = double;
using Emission = double;

// Raised when input data (files, configs) cannot be accepted.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  explicit ParseError(const std::string& msg) : std::runtime_error(msg), line_(-1) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncoderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic RNG. All sampling goes through these helpers so the stream
// is pinned by this code, not by library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ull)) {
    // warm up so small seeds diverge immediately
    for (int i = 0; i < 4; ++i) next();
  }

  std::uint64_t next() {
    // xorshift64* keeps the generator self-contained and portable
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

  // uniform in [0,1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // inclusive range
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // derive an independent stream for a tagged sub-task
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return splitmix(seed * 0x9e3779b97f4a7c15ull + tag);
  }

 private:
  std::uint64_t state_;
};

inline double round_to_tenth(double x) { return std::nearbyint(x * 10.0) / 10.0; }

// shortest decimal representation that parses back to the same double
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// fixed one-decimal rendering used by prompts and the FJSP writer
inline std::string format_fixed1(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", x);
  return std::string(buf);
}

inline bool has_tenth_granularity(double x) {
  return std::fabs(x * 10.0 - std::nearbyint(x * 10.0)) < 1e-9;
}

}  // namespace luca
