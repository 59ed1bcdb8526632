#pragma once
// Chat-completion acquisition with exponential-backoff retry and a
// content-addressed disk cache. A warm cache replays an entire benchmark
// with zero network calls.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgstress {

struct GatewayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AuthMissingError : GatewayError {
  AuthMissingError() : GatewayError("provider credential not configured") {}
};
struct ProviderExhaustedError : GatewayError {
  using GatewayError::GatewayError;
};
struct CacheCorruptError : GatewayError {
  using GatewayError::GatewayError;
};
struct OfflineCacheMissError : GatewayError {
  using GatewayError::GatewayError;
};

struct QuerySpec {
  std::string model = "gpt-4.1-mini";
  std::string prompt;
  std::size_t max_tokens = 1024;
  std::vector<std::string> response_schema;  // requested field names
  double temperature = 0.0;

  // Canonical JSON used for cache keying; key-complete over all fields.
  std::string canonical() const;
  std::string cache_key() const;
};

struct CachedResponse {
  std::string key;
  std::string raw;
  bool parsed_ok = false;
  std::int64_t timestamp = 0;
  bool from_cache = false;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  // Throws GatewayError on transport or HTTP failure, AuthMissingError
  // when credentials are absent.
  virtual std::string complete(const QuerySpec& spec) = 0;
};

// OpenAI-style chat completions endpoint; credential read from
// KGSTRESS_API_KEY (fallback OPENAI_API_KEY).
std::unique_ptr<ChatProvider> make_http_chat_provider(const std::string& base_url);

// Injectable so tests can observe the retry schedule without waiting.
class Sleeper {
 public:
  virtual ~Sleeper() = default;
  virtual void sleep_seconds(double seconds) = 0;
};

struct GatewayOptions {
  bool offline = false;
  std::vector<double> retry_delays = {1.0, 2.0, 4.0, 8.0};
  std::size_t max_in_flight = 4;
};

class Gateway {
 public:
  Gateway(std::string cache_dir, std::unique_ptr<ChatProvider> provider,
          GatewayOptions options = {}, std::shared_ptr<Sleeper> sleeper = nullptr);

  // Cache hit replays the stored bytes; miss calls the provider with one
  // attempt per retry delay and persists the success before returning.
  CachedResponse query(const QuerySpec& spec);

  std::vector<CachedResponse> query_batch(const std::vector<QuerySpec>& specs);

 private:
  std::optional<CachedResponse> read_cache(const QuerySpec& spec) const;
  void write_cache(const QuerySpec& spec, const CachedResponse& response) const;

  std::string cache_dir_;
  std::unique_ptr<ChatProvider> provider_;
  GatewayOptions options_;
  std::shared_ptr<Sleeper> sleeper_;
};

struct StructuredRecord {
  bool ok = false;
  std::map<std::string, std::vector<std::string>> fields;
  std::vector<std::string> dropped_fields;
};

// Extracts the first JSON object from raw model output (code fences and
// surrounding prose tolerated) and coerces the declared fields to string
// lists. Never throws: unparseable input yields ok = false and all-empty
// fields.
StructuredRecord parse_structured(const std::string& raw,
                                  const std::vector<std::string>& schema_fields);

}  // namespace kgstress
