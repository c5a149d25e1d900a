#include "luca/text_encoder.hpp"

#include <cctype>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace luca {

namespace {

std::uint64_t fnv1a64(const char* begin, const char* end) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char* p = begin; p != end; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ull;
  }
  return h;
}

void l2_normalize(Vector& v) {
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq == 0.0) return;  // empty input keeps the zero vector
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
}

}  // namespace

Vector BuiltinHashEncoder::encode(const std::string& text) {
  Vector acc(dim, 0.0);
  const char* p = text.data();
  const char* end = p + text.size();
  while (p != end) {
    while (p != end && !std::isalnum(static_cast<unsigned char>(*p)) && *p != '_') ++p;
    const char* start = p;
    while (p != end && (std::isalnum(static_cast<unsigned char>(*p)) || *p == '_')) ++p;
    if (p == start) continue;
    const std::uint64_t h = fnv1a64(start, p);
    const int bucket = static_cast<int>(h % dim);
    const double sign = ((h >> 32) & 1ull) ? 1.0 : -1.0;
    acc[bucket] += sign;
  }
  l2_normalize(acc);
  return acc;
}

RemoteTextEncoder::RemoteTextEncoder(const std::string& url, int timeout_ms)
    : url_(url), timeout_ms_(timeout_ms) {
  std::string rest = url;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) != 0)
    throw ConfigError("remote encoder URL must start with http:// (got '" + url + "')");
  rest = rest.substr(scheme.size());
  const auto slash = rest.find('/');
  std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = hostport.find(':');
  if (colon == std::string::npos) {
    host_ = hostport;
  } else {
    host_ = hostport.substr(0, colon);
    try {
      port_ = std::stoi(hostport.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad port in encoder URL '" + url + "'");
    }
  }
  if (host_.empty()) throw ConfigError("missing host in encoder URL '" + url + "'");
}

Vector RemoteTextEncoder::encode(const std::string& text) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(0, timeout_ms_ * 1000);
  client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

  nlohmann::json body;
  body["text"] = text;
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) throw EncoderError("remote encoder unreachable: " + url_);
  if (res->status != 200)
    throw EncoderError("remote encoder returned HTTP " + std::to_string(res->status));

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const std::exception& e) {
    throw EncoderError(std::string("remote encoder sent invalid JSON: ") + e.what());
  }
  if (!parsed.contains("embedding") || !parsed["embedding"].is_array())
    throw EncoderError("remote encoder response lacks 'embedding' array");
  const auto& arr = parsed["embedding"];
  if (arr.size() != static_cast<std::size_t>(dim))
    throw EncoderError("remote encoder returned " + std::to_string(arr.size()) +
                       " values, expected " + std::to_string(dim));
  Vector v(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    if (!arr[i].is_number()) throw EncoderError("non-numeric value in embedding");
    v[i] = arr[i].get<double>();
    if (!std::isfinite(v[i])) throw EncoderError("non-finite value in embedding");
  }
  l2_normalize(v);
  return v;
}

Vector FallbackEncoder::encode(const std::string& text) {
  try {
    return primary_->encode(text);
  } catch (const EncoderError&) {
    ++fallbacks_;
    return secondary_->encode(text);
  }
}

Vector CachingEncoder::encode(const std::string& text) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
  }
  Vector v = inner_->encode(text);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (cache_.size() >= max_entries_) cache_.clear();
    cache_.emplace(text, v);
  }
  return v;
}

std::unique_ptr<TextEncoder> make_encoder(const std::string& kind, const std::string& url,
                                          int timeout_ms, bool fallback_to_builtin) {
  if (kind == "builtin") return std::make_unique<BuiltinHashEncoder>();
  if (kind == "remote") {
    auto remote = std::make_unique<RemoteTextEncoder>(url, timeout_ms);
    if (fallback_to_builtin)
      return std::make_unique<FallbackEncoder>(std::move(remote),
                                               std::make_unique<BuiltinHashEncoder>());
    return remote;
  }
  throw ConfigError("unknown encoder kind '" + kind + "' (expected builtin|remote)");
}

}  // namespace luca
