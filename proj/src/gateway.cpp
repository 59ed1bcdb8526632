#include "kgstress/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"
#include "kgstress/hash.hpp"

namespace kgstress {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class RealSleeper : public Sleeper {
 public:
  void sleep_seconds(double seconds) override {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
};

class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(std::string base_url) : base_url_(std::move(base_url)) {}

  std::string complete(const QuerySpec& spec) override {
    const char* key = std::getenv("KGSTRESS_API_KEY");
    if (key == nullptr) key = std::getenv("OPENAI_API_KEY");
    if (key == nullptr || *key == '\0') throw AuthMissingError();

    httplib::Client client(base_url_);
    client.set_read_timeout(120, 0);
    client.set_bearer_token_auth(key);
    const json body{
        {"model", spec.model},
        {"messages", json::array({{{"role", "user"}, {"content", spec.prompt}}})},
        {"max_tokens", spec.max_tokens},
        {"temperature", spec.temperature},
    };
    auto res = client.Post("/v1/chat/completions", body.dump(), "application/json");
    if (!res)
      throw GatewayError("chat provider unreachable at " + base_url_);
    if (res->status != 200)
      throw GatewayError("chat provider returned HTTP " + std::to_string(res->status));
    const json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded())
      throw GatewayError("chat provider returned non-JSON body");
    try {
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw GatewayError("chat provider response missing choices[0].message.content");
    }
  }

 private:
  std::string base_url_;
};

std::int64_t now_unix() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string QuerySpec::canonical() const {
  // nlohmann orders object keys, so this dump is canonical.
  return json{{"model", model},
              {"prompt", prompt},
              {"max_tokens", max_tokens},
              {"schema", response_schema},
              {"temperature", temperature}}
      .dump();
}

std::string QuerySpec::cache_key() const { return sha256_hex(canonical()); }

std::unique_ptr<ChatProvider> make_http_chat_provider(const std::string& base_url) {
  return std::make_unique<HttpChatProvider>(base_url);
}

Gateway::Gateway(std::string cache_dir, std::unique_ptr<ChatProvider> provider,
                 GatewayOptions options, std::shared_ptr<Sleeper> sleeper)
    : cache_dir_(std::move(cache_dir)),
      provider_(std::move(provider)),
      options_(std::move(options)),
      sleeper_(sleeper ? std::move(sleeper) : std::make_shared<RealSleeper>()) {
  fs::create_directories(cache_dir_);
}

std::optional<CachedResponse> Gateway::read_cache(const QuerySpec& spec) const {
  const std::string key = spec.cache_key();
  const fs::path path = fs::path(cache_dir_) / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  const json entry = json::parse(buf.str(), nullptr, false);
  if (entry.is_discarded())
    throw CacheCorruptError("cache entry " + path.string() + " is not valid JSON");
  CachedResponse resp;
  resp.key = key;
  resp.raw = entry.value("raw", "");
  resp.parsed_ok = entry.value("parsed_ok", false);
  resp.timestamp = entry.value("timestamp", std::int64_t{0});
  resp.from_cache = true;
  if (entry.value("checksum", "") != sha256_hex(resp.raw))
    throw CacheCorruptError("cache entry " + path.string() + " failed its checksum");
  return resp;
}

void Gateway::write_cache(const QuerySpec& spec, const CachedResponse& response) const {
  const fs::path path = fs::path(cache_dir_) / (response.key + ".json");
  const fs::path tmp = fs::path(cache_dir_) / (response.key + ".tmp");
  const json entry{{"key", response.key},
                   {"spec", json::parse(spec.canonical())},
                   {"raw", response.raw},
                   {"parsed_ok", response.parsed_ok},
                   {"timestamp", response.timestamp},
                   {"checksum", sha256_hex(response.raw)}};
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << entry.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

CachedResponse Gateway::query(const QuerySpec& spec) {
  if (spec.prompt.empty()) throw GatewayError("query prompt is empty");
  if (spec.max_tokens > 1024)
    throw GatewayError("max_tokens exceeds the benchmark cap of 1024");
  if (auto cached = read_cache(spec)) return *cached;
  if (options_.offline)
    throw OfflineCacheMissError("offline mode and no cache entry for key " +
                                spec.cache_key());
  if (provider_ == nullptr) throw GatewayError("no chat provider configured");

  std::string last_error = "no attempt made";
  for (double delay : options_.retry_delays) {
    try {
      CachedResponse resp;
      resp.key = spec.cache_key();
      resp.raw = provider_->complete(spec);
      resp.parsed_ok = parse_structured(resp.raw, spec.response_schema).ok;
      resp.timestamp = now_unix();
      write_cache(spec, resp);
      return resp;
    } catch (const AuthMissingError&) {
      throw;  // credentials will not appear on retry
    } catch (const GatewayError& e) {
      last_error = e.what();
      sleeper_->sleep_seconds(delay);
    }
  }
  throw ProviderExhaustedError("provider failed " +
                               std::to_string(options_.retry_delays.size()) +
                               " times; last error: " + last_error);
}

std::vector<CachedResponse> Gateway::query_batch(const std::vector<QuerySpec>& specs) {
  std::vector<CachedResponse> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  const std::size_t width = std::max<std::size_t>(1, options_.max_in_flight);
  for (std::size_t start = 0; start < specs.size(); start += width) {
    const std::size_t end = std::min(specs.size(), start + width);
    std::vector<std::thread> workers;
    for (std::size_t i = start; i < end; ++i) {
      workers.emplace_back([this, i, &specs, &out, &errors] {
        try {
          out[i] = query(specs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

StructuredRecord parse_structured(const std::string& raw,
                                  const std::vector<std::string>& schema_fields) {
  StructuredRecord record;
  for (const auto& f : schema_fields) record.fields[f] = {};

  // Find the first balanced top-level object, skipping over string
  // literals; code fences and prose fall out naturally.
  json parsed;
  bool found = false;
  for (std::size_t start = 0; start < raw.size() && !found; ++start) {
    if (raw[start] != '{') continue;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}') {
        if (--depth == 0) {
          json candidate = json::parse(raw.substr(start, i - start + 1), nullptr, false);
          if (!candidate.is_discarded() && candidate.is_object()) {
            parsed = std::move(candidate);
            found = true;
          }
          break;
        }
      }
    }
  }
  if (!found) return record;  // ok stays false; all fields empty

  auto coerce = [](const json& value) {
    std::vector<std::string> out;
    if (value.is_null()) return out;
    if (value.is_string()) {
      if (!value.get<std::string>().empty()) out.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (item.is_string()) out.push_back(item.get<std::string>());
        else out.push_back(item.dump());
      }
    } else {
      out.push_back(value.dump());
    }
    return out;
  };

  for (const auto& [key, value] : parsed.items()) {
    if (record.fields.contains(key))
      record.fields[key] = coerce(value);
    else
      record.dropped_fields.push_back(key);
  }
  record.ok = true;
  return record;
}

}  // namespace kgstress
