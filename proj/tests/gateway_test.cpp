#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "kgstress/gateway.hpp"

using namespace kgstress;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) {
    path = fs::temp_directory_path() / (std::string("kgstress_") + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

class CountingProvider : public ChatProvider {
 public:
  explicit CountingProvider(std::string reply, int fail_first = 0)
      : reply_(std::move(reply)), fail_remaining_(fail_first) {}
  std::string complete(const QuerySpec&) override {
    ++calls;
    if (fail_remaining_ > 0) {
      --fail_remaining_;
      throw GatewayError("simulated transport failure");
    }
    return reply_;
  }
  int calls = 0;

 private:
  std::string reply_;
  int fail_remaining_;
};

class RecordingSleeper : public Sleeper {
 public:
  void sleep_seconds(double seconds) override { slept.push_back(seconds); }
  std::vector<double> slept;
};

}  // namespace

TEST_CASE("cache keys are injective over every spec field") {
  QuerySpec base;
  base.prompt = "list the nouns";
  const std::string k0 = base.cache_key();
  QuerySpec q;

  q = base;
  q.prompt = "list the verbs";
  CHECK(q.cache_key() != k0);
  q = base;
  q.model = "other-model";
  CHECK(q.cache_key() != k0);
  q = base;
  q.max_tokens = 512;
  CHECK(q.cache_key() != k0);
  q = base;
  q.temperature = 0.5;
  CHECK(q.cache_key() != k0);
  q = base;
  q.response_schema = {"noun"};
  CHECK(q.cache_key() != k0);
  CHECK(base.cache_key() == k0);  // stable across calls
}

TEST_CASE("a successful query is persisted and replayed with zero provider calls") {
  TempDir dir("gateway_replay");
  QuerySpec spec;
  spec.prompt = "hello";
  {
    auto provider = std::make_unique<CountingProvider>("{\"noun\": [\"being\"]}");
    auto* raw = provider.get();
    Gateway gateway(dir.path.string(), std::move(provider));
    const auto first = gateway.query(spec);
    CHECK_FALSE(first.from_cache);
    CHECK(raw->calls == 1);
    const auto second = gateway.query(spec);
    CHECK(second.from_cache);
    CHECK(second.raw == first.raw);
    CHECK(raw->calls == 1);
  }
  {
    // a brand-new gateway in offline mode replays purely from disk
    GatewayOptions opts;
    opts.offline = true;
    auto provider = std::make_unique<CountingProvider>("never used");
    auto* raw = provider.get();
    Gateway gateway(dir.path.string(), std::move(provider), opts);
    CHECK(gateway.query(spec).from_cache);
    CHECK(raw->calls == 0);
    QuerySpec miss;
    miss.prompt = "not cached";
    CHECK_THROWS_AS(gateway.query(miss), OfflineCacheMissError);
    CHECK(raw->calls == 0);
  }
}

TEST_CASE("retry schedule is 1, 2, 4, 8 seconds, then exhaustion") {
  TempDir dir("gateway_retry");
  auto sleeper = std::make_shared<RecordingSleeper>();
  auto provider = std::make_unique<CountingProvider>("ok", /*fail_first=*/1000);
  auto* raw = provider.get();
  Gateway gateway(dir.path.string(), std::move(provider), {}, sleeper);
  QuerySpec spec;
  spec.prompt = "doomed";
  CHECK_THROWS_AS(gateway.query(spec), ProviderExhaustedError);
  CHECK(raw->calls == 4);
  CHECK(sleeper->slept == std::vector<double>{1.0, 2.0, 4.0, 8.0});
}

TEST_CASE("a transient failure recovers on retry") {
  TempDir dir("gateway_transient");
  auto sleeper = std::make_shared<RecordingSleeper>();
  Gateway gateway(dir.path.string(),
                  std::make_unique<CountingProvider>("fine", /*fail_first=*/2), {},
                  sleeper);
  QuerySpec spec;
  spec.prompt = "eventually fine";
  CHECK(gateway.query(spec).raw == "fine");
  CHECK(sleeper->slept == std::vector<double>{1.0, 2.0});
}

TEST_CASE("missing credentials abort immediately without retries") {
  TempDir dir("gateway_auth");
  class NoAuth : public ChatProvider {
   public:
    std::string complete(const QuerySpec&) override { throw AuthMissingError(); }
  };
  auto sleeper = std::make_shared<RecordingSleeper>();
  Gateway gateway(dir.path.string(), std::make_unique<NoAuth>(), {}, sleeper);
  QuerySpec spec;
  spec.prompt = "x";
  CHECK_THROWS_AS(gateway.query(spec), AuthMissingError);
  CHECK(sleeper->slept.empty());
}

TEST_CASE("corrupted cache entries are detected, not silently replayed") {
  TempDir dir("gateway_corrupt");
  QuerySpec spec;
  spec.prompt = "payload";
  {
    Gateway gateway(dir.path.string(), std::make_unique<CountingProvider>("data"));
    gateway.query(spec);
  }
  // flip the stored bytes without updating the checksum
  const fs::path entry = dir.path / (spec.cache_key() + ".json");
  REQUIRE(fs::exists(entry));
  std::string content;
  {
    std::ifstream in(entry);
    std::getline(in, content, '\0');
  }
  auto pos = content.find("data");
  REQUIRE(pos != std::string::npos);
  content.replace(pos, 4, "DATA");
  {
    std::ofstream out(entry, std::ios::trunc);
    out << content;
  }
  Gateway gateway(dir.path.string(), std::make_unique<CountingProvider>("data"));
  CHECK_THROWS_AS(gateway.query(spec), CacheCorruptError);
}

TEST_CASE("query validation: empty prompt and oversized max_tokens") {
  TempDir dir("gateway_validate");
  Gateway gateway(dir.path.string(), std::make_unique<CountingProvider>("x"));
  QuerySpec empty;
  CHECK_THROWS_AS(gateway.query(empty), GatewayError);
  QuerySpec big;
  big.prompt = "p";
  big.max_tokens = 2048;
  CHECK_THROWS_AS(gateway.query(big), GatewayError);
}

TEST_CASE("query_batch honors the in-flight cap and preserves order") {
  TempDir dir("gateway_batch");
  Gateway gateway(dir.path.string(), std::make_unique<CountingProvider>("r"));
  std::vector<QuerySpec> specs(9);
  for (std::size_t i = 0; i < specs.size(); ++i)
    specs[i].prompt = "prompt " + std::to_string(i);
  const auto responses = gateway.query_batch(specs);
  REQUIRE(responses.size() == 9);
  for (std::size_t i = 0; i < specs.size(); ++i)
    CHECK(responses[i].key == specs[i].cache_key());
}

TEST_CASE("parse_structured extracts the first object and coerces fields") {
  const std::vector<std::string> schema{"noun", "verb"};
  const auto rec = parse_structured(
      "Sure! Here is the JSON:\n```json\n{\"noun\": [\"being\", \"entity\"], "
      "\"verb\": \"exist\", \"extra\": 1}\n```", schema);
  CHECK(rec.ok);
  CHECK(rec.fields.at("noun") == std::vector<std::string>{"being", "entity"});
  CHECK(rec.fields.at("verb") == std::vector<std::string>{"exist"});
  CHECK(rec.dropped_fields == std::vector<std::string>{"extra"});
}

TEST_CASE("parse_structured never throws on garbage") {
  const std::vector<std::string> schema{"a"};
  for (const char* raw : {"", "no json here", "{broken", "[1,2,3]", "{\"a\": }"}) {
    const auto rec = parse_structured(raw, schema);
    CHECK_FALSE(rec.ok);
    CHECK(rec.fields.at("a").empty());
  }
  // braces inside string literals do not confuse the scanner
  const auto rec = parse_structured("prefix {\"a\": [\"x } y\"]} suffix", schema);
  CHECK(rec.ok);
  CHECK(rec.fields.at("a") == std::vector<std::string>{"x } y"});
  // null, numbers, and empty strings coerce sensibly
  const auto rec2 = parse_structured("{\"a\": null}", schema);
  CHECK(rec2.ok);
  CHECK(rec2.fields.at("a").empty());
  const auto rec3 = parse_structured("{\"a\": 42}", schema);
  CHECK(rec3.fields.at("a") == std::vector<std::string>{"42"});
  const auto rec4 = parse_structured("{\"a\": \"\"}", schema);
  CHECK(rec4.fields.at("a").empty());
}
