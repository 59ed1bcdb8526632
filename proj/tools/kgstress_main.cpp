// kgstress: build knowledge graphs from structured sources, stress-test a
// generated graph against a reference, evaluate field-level records, and
// audit citation integrity.
//
// Exit codes: 0 success, 2 input error, 3 cache/provider error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kgstress/citation.hpp"
#include "kgstress/gateway.hpp"
#include "kgstress/record_eval.hpp"
#include "kgstress/roget.hpp"
#include "kgstress/stress.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace kgstress;

constexpr int kExitInput = 2;
constexpr int kExitCache = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

GraphFormat format_for(const std::string& path, const std::string& forced) {
  std::string key = forced;
  if (key.empty()) {
    const std::string ext = fs::path(path).extension().string();
    if (ext == ".graphml" || ext == ".xml") key = "graphml";
    else if (ext == ".dot" || ext == ".gv") key = "dot";
    else key = "jsonl";
  }
  if (key == "graphml") return GraphFormat::GraphML;
  if (key == "dot") return GraphFormat::DOT;
  if (key == "jsonl") return GraphFormat::JSONL;
  throw std::runtime_error("unknown graph format '" + key + "'");
}

// All constants echoed so report consumers can audit the run.
json config_header(int threshold, std::uint64_t seed) {
  return json{{"match_threshold", threshold},
              {"seed", seed},
              {"mobility_threshold", 0.25},
              {"pagerank_damping", 0.85},
              {"retry_delays_s", {1, 2, 4, 8}},
              {"model", "gpt-4.1-mini"},
              {"max_tokens", 1024}};
}

int cmd_parse_roget(const std::string& input, const std::string& out,
                    const std::string& sample_out, std::size_t n, std::uint64_t seed) {
  const std::string text = slurp(input);
  RogetParseStats stats;
  const auto heads = parse_thesaurus(text, &stats);
  spit(out, heads_to_jsonl(heads));
  if (!sample_out.empty()) spit(sample_out, heads_to_jsonl(sample_heads(heads, n, seed)));
  std::cout << "parsed " << heads.size() << " valid heads (" << stats.head_markers
            << " markers, " << stats.skipped_invalid << " skipped)\n";
  return 0;
}

int cmd_build_graph(const std::string& heads_path, const std::string& out,
                    const std::string& format, const std::string& name) {
  auto build = head_to_graph(heads_from_jsonl(slurp(heads_path)), name);
  spit(out, build.graph.export_to(format_for(out, format)));
  std::cout << "graph: " << build.graph.node_count() << " nodes, "
            << build.graph.edge_count() << " edges, " << build.dropped_cross_refs
            << " cross-references dropped (target outside set)\n";
  return 0;
}

int cmd_stress(const std::string& truth_path, const std::string& gen_path,
               const std::string& out, const std::string& summary_out,
               const std::string& format, std::uint64_t seed) {
  const auto g_ref = KnowledgeGraph::import_from(slurp(truth_path),
                                                format_for(truth_path, format));
  const auto g_llm = KnowledgeGraph::import_from(slurp(gen_path),
                                                format_for(gen_path, format));
  StressConfig config;
  config.louvain_seed = seed;
  const StressReport report = run_stress_test(g_llm, g_ref, config);

  json j = json::parse(report.to_json());
  j["header"] = config_header(80, seed);
  spit(out, j.dump(2) + "\n");
  const std::string summary = report.to_text_summary();
  if (!summary_out.empty()) spit(summary_out, summary);
  std::cout << summary;
  return 0;
}

int cmd_eval(const std::string& schema_path, const std::string& records_path,
             const std::string& queries_path, const std::string& cache_dir,
             const std::string& oracle_cache, bool oracle_cache_only, bool offline,
             int threshold, std::uint64_t seed, const std::string& out,
             const std::string& csv_out) {
  const Schema schema = Schema::from_json(slurp(schema_path));
  std::vector<RecordPair> pairs = load_record_pairs_jsonl(slurp(records_path));

  // Stage 1 (optional): acquire the generated side through the cache-backed
  // gateway. Each query line: {"entity_id", "prompt"}; the response schema is
  // the benchmark schema's field list.
  if (!queries_path.empty()) {
    std::vector<std::string> fields;
    for (const auto& f : schema.fields) fields.push_back(f.name);
    GatewayOptions opts;
    opts.offline = offline;
    Gateway gateway(cache_dir,
                    offline ? nullptr : make_http_chat_provider(
                        std::getenv("KGSTRESS_PROVIDER_URL")
                            ? std::getenv("KGSTRESS_PROVIDER_URL")
                            : "https://api.openai.com"),
                    opts);
    std::map<std::string, RecordPair*> by_id;
    for (auto& p : pairs) by_id[p.entity_id] = &p;
    std::istringstream in(slurp(queries_path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json q = json::parse(line);
      QuerySpec spec;
      spec.prompt = q.at("prompt").get<std::string>();
      spec.response_schema = fields;
      const CachedResponse resp = gateway.query(spec);
      const StructuredRecord rec = parse_structured(resp.raw, fields);
      auto it = by_id.find(q.at("entity_id").get<std::string>());
      if (it == by_id.end()) continue;
      for (const auto& [field, values] : rec.fields)
        it->second->field_values[field].second = values;
    }
  }

  std::unique_ptr<CachedOracle> oracle;
  if (!oracle_cache.empty())
    oracle = std::make_unique<CachedOracle>(oracle_cache, oracle_cache_only, nullptr);

  const auto results = evaluate_benchmark(pairs, schema, threshold, oracle.get());
  if (oracle) oracle->flush();

  json j;
  j["header"] = config_header(threshold, seed);
  j["benchmark"] = schema.benchmark;
  j["fields"] = json::parse(field_results_to_json(results));
  spit(out, j.dump(2) + "\n");
  if (!csv_out.empty()) spit(csv_out, field_results_to_csv(results));
  std::cout << field_results_to_csv(results);
  return 0;
}

int cmd_audit_citations(const std::string& truth_path, const std::string& gen_path,
                        int threshold, const std::string& out,
                        const std::string& csv_out, const std::string& stress_out,
                        std::uint64_t seed) {
  const auto truth = load_bib_records_jsonl(slurp(truth_path));
  const auto generated = load_bib_records_jsonl(slurp(gen_path));
  const CitationAudit audit = run_citation_audit(truth, generated, threshold);

  json j = json::parse(audit.to_json());
  j["header"] = config_header(threshold, seed);
  if (!stress_out.empty()) {
    StressConfig config;
    config.louvain_seed = seed;
    const auto report = run_stress_test(citation_graph(generated, "generated"),
                                        citation_graph(truth, "truth"), config);
    j["stress"] = json::parse(report.to_json());
    spit(stress_out, report.to_json() + "\n");
  }
  spit(out, j.dump(2) + "\n");
  if (!csv_out.empty()) spit(csv_out, field_results_to_csv(audit.field_results));
  std::cout << "citation recall " << audit.recall.recall << ", omission "
            << audit.recall.omission << ", papers with citations "
            << audit.recall.papers_with_citations << "/" << audit.recall.paper_count
            << "\n";
  return 0;
}

int cmd_report(const std::string& stress_json) {
  const StressReport report = StressReport::from_json(slurp(stress_json));
  std::cout << report.to_text_summary();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structural-hallucination stress-test toolkit"};
  app.require_subcommand(1);

  std::string input, out, sample_out, format, name = "graph";
  std::string truth_path, gen_path, summary_out, csv_out, stress_out;
  std::string schema_path, records_path, queries_path, cache_dir = ".kgstress-cache";
  std::string oracle_cache;
  bool oracle_cache_only = false, offline = false;
  std::size_t n = 30;
  std::uint64_t seed = 42;
  int threshold = 80;

  auto* parse = app.add_subcommand("parse-roget", "parse a 1911 thesaurus text file");
  parse->add_option("--input", input)->required();
  parse->add_option("--out", out)->required();
  parse->add_option("--sample-out", sample_out);
  parse->add_option("--n", n, "sample size");
  parse->add_option("--seed", seed);

  auto* build = app.add_subcommand("build-graph", "heads JSONL -> knowledge graph");
  build->add_option("--heads", input)->required();
  build->add_option("--out", out)->required();
  build->add_option("--format", format, "graphml|dot|jsonl (default: by extension)");
  build->add_option("--name", name);

  auto* stress = app.add_subcommand("stress", "compare generated graph to reference");
  stress->add_option("--truth", truth_path)->required();
  stress->add_option("--generated", gen_path)->required();
  stress->add_option("--out", out)->required();
  stress->add_option("--summary", summary_out);
  stress->add_option("--format", format);
  stress->add_option("--seed", seed);

  auto* eval = app.add_subcommand("eval", "field-level record evaluation");
  eval->add_option("--schema", schema_path)->required();
  eval->add_option("--records", records_path)->required();
  eval->add_option("--queries", queries_path, "prompts JSONL for gateway acquisition");
  eval->add_option("--cache-dir", cache_dir);
  eval->add_option("--oracle-cache", oracle_cache);
  eval->add_flag("--oracle-cache-only", oracle_cache_only);
  eval->add_flag("--offline", offline);
  eval->add_option("--threshold", threshold);
  eval->add_option("--seed", seed);
  eval->add_option("--out", out)->required();
  eval->add_option("--csv", csv_out);

  auto* audit = app.add_subcommand("audit-citations", "citation integrity audit");
  audit->add_option("--truth", truth_path)->required();
  audit->add_option("--generated", gen_path)->required();
  audit->add_option("--threshold", threshold);
  audit->add_option("--out", out)->required();
  audit->add_option("--csv", csv_out);
  audit->add_option("--stress-out", stress_out, "also stress-test the citation graphs");
  audit->add_option("--seed", seed);

  auto* report = app.add_subcommand("report", "print the text summary of a stress report");
  report->add_option("--stress", input)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse->parsed()) return cmd_parse_roget(input, out, sample_out, n, seed);
    if (build->parsed()) return cmd_build_graph(input, out, format, name);
    if (stress->parsed())
      return cmd_stress(truth_path, gen_path, out, summary_out, format, seed);
    if (eval->parsed())
      return cmd_eval(schema_path, records_path, queries_path, cache_dir, oracle_cache,
                      oracle_cache_only, offline, threshold, seed, out, csv_out);
    if (audit->parsed())
      return cmd_audit_citations(truth_path, gen_path, threshold, out, csv_out,
                                 stress_out, seed);
    if (report->parsed()) return cmd_report(input);
  } catch (const OfflineCacheMissError& e) {
    std::cerr << "error: cache miss: " << e.what() << "\n";
    return kExitCache;
  } catch (const CacheCorruptError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCache;
  } catch (const ProviderExhaustedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCache;
  } catch (const AuthMissingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCache;
  } catch (const OracleUnavailableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCache;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
