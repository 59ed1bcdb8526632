#pragma once
// Structural divergence diagnostic comparing a generated knowledge graph
// against a reference graph: fabrication rate, node/edge Jaccard,
// per-measure centrality rank correlation, modularity comparison, and
// upward-mobility detection.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgstress/graph.hpp"
#include "kgstress/metrics.hpp"

namespace kgstress {

struct EmptyGeneratedGraphError : MetricsError {
  EmptyGeneratedGraphError()
      : MetricsError("generated graph has no nodes; fabrication rate undefined") {}
};

struct StressConfig {
  std::vector<CentralityMeasure> measures = {CentralityMeasure::Degree,
                                             CentralityMeasure::Betweenness,
                                             CentralityMeasure::PageRank};
  CentralityMeasure mobility_measure = CentralityMeasure::PageRank;
  double mobility_threshold = 0.25;  // percentile-rank improvement
  double fabricated_top_percentile = 0.90;  // fabricated nodes above this qualify
  std::uint64_t louvain_seed = 42;
  PageRankOptions pagerank;
};

struct MeasureCorrelation {
  std::optional<RankCorrelation> value;  // empty: insufficient overlap
};

struct UpwardMobileNode {
  std::string node;
  double percentile_ref = 0.0;  // 1.0 = most central; 0 for fabricated nodes
  double percentile_llm = 0.0;
  double delta = 0.0;
  bool is_fabrication = false;
};

struct StressReport {
  StressConfig config;
  double fabrication_rate = 0.0;
  std::set<std::string> fabricated_nodes;
  double node_jaccard = 0.0;
  double edge_jaccard = 0.0;
  std::map<CentralityMeasure, MeasureCorrelation> rank_correlations;
  double modularity_ref = 0.0;
  double modularity_llm = 0.0;
  std::pair<std::size_t, std::size_t> community_counts{0, 0};  // (ref, llm)
  std::vector<UpwardMobileNode> upward_mobile;

  std::string to_json() const;
  static StressReport from_json(const std::string& text);
  std::string to_text_summary() const;
};

std::pair<double, std::set<std::string>> fabrication_rate(const KnowledgeGraph& g_llm,
                                                          const KnowledgeGraph& g_ref);

std::map<CentralityMeasure, MeasureCorrelation> structural_alignment(
    const KnowledgeGraph& g_llm, const KnowledgeGraph& g_ref,
    const std::vector<CentralityMeasure>& measures);

std::vector<UpwardMobileNode> upward_mobility(const KnowledgeGraph& g_llm,
                                              const KnowledgeGraph& g_ref,
                                              CentralityMeasure measure,
                                              double threshold,
                                              double fabricated_top_percentile = 0.90);

StressReport run_stress_test(const KnowledgeGraph& g_llm, const KnowledgeGraph& g_ref,
                             const StressConfig& config = {});

}  // namespace kgstress
