#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "luca/neural.hpp"

namespace luca {

// Fixed-length text embedding source. Implementations return an
// L2-normalized 128-vector (zero vector for empty input).
class TextEncoder {
 public:
  static constexpr int dim = 128;
  virtual ~TextEncoder() = default;
  virtual Vector encode(const std::string& text) = 0;
  virtual std::string describe() const = 0;
};

// Deterministic signed feature hashing over whitespace/punctuation tokens.
class BuiltinHashEncoder : public TextEncoder {
 public:
  Vector encode(const std::string& text) override;
  std::string describe() const override { return "builtin-hash"; }
};

// POSTs {"text": ...} to an HTTP endpoint, expects {"embedding": [128 numbers]}.
class RemoteTextEncoder : public TextEncoder {
 public:
  RemoteTextEncoder(const std::string& url, int timeout_ms = 2000);
  Vector encode(const std::string& text) override;  // throws EncoderError
  std::string describe() const override { return "remote(" + url_ + ")"; }

 private:
  std::string url_;
  std::string host_;
  int port_ = 80;
  std::string path_ = "/";
  int timeout_ms_;
};

// Tries the primary encoder, falls back to the secondary on EncoderError.
class FallbackEncoder : public TextEncoder {
 public:
  FallbackEncoder(std::unique_ptr<TextEncoder> primary, std::unique_ptr<TextEncoder> secondary)
      : primary_(std::move(primary)), secondary_(std::move(secondary)) {}
  Vector encode(const std::string& text) override;
  std::string describe() const override {
    return primary_->describe() + "+fallback:" + secondary_->describe();
  }
  int fallback_count() const { return fallbacks_; }

 private:
  std::unique_ptr<TextEncoder> primary_;
  std::unique_ptr<TextEncoder> secondary_;
  int fallbacks_ = 0;
};

// Memoizes encodings by exact document text.
class CachingEncoder : public TextEncoder {
 public:
  explicit CachingEncoder(std::unique_ptr<TextEncoder> inner, std::size_t max_entries = 200000)
      : inner_(std::move(inner)), max_entries_(max_entries) {}
  Vector encode(const std::string& text) override;
  std::string describe() const override { return inner_->describe() + "+cache"; }

 private:
  std::unique_ptr<TextEncoder> inner_;
  std::size_t max_entries_;
  std::mutex mu_;
  std::unordered_map<std::string, Vector> cache_;
};

// builds builtin | remote (| fallback chain) from config values
std::unique_ptr<TextEncoder> make_encoder(const std::string& kind, const std::string& url,
                                          int timeout_ms, bool fallback_to_builtin);

}  // namespace luca
