#include "kgstress/stress.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace kgstress {

namespace {

using nlohmann::json;

// Percentile rank per node, 1.0 = most central, average ranks for ties,
// normalized by (n - 1).
std::map<std::string, double> percentile_ranks(const CentralityVector& cv) {
  std::vector<std::string> labels;
  std::vector<double> values;
  labels.reserve(cv.scores.size());
  for (const auto& [node, score] : cv.scores) {
    labels.push_back(node);
    values.push_back(score);
  }
  const std::size_t n = labels.size();
  std::map<std::string, double> out;
  if (n == 1) {
    out.emplace(labels[0], 1.0);
    return out;
  }
  const std::vector<double> ranks = average_ranks(values);
  for (std::size_t i = 0; i < n; ++i)
    out.emplace(labels[i], (ranks[i] - 1.0) / static_cast<double>(n - 1));
  return out;
}

CentralityVector compute_measure(const KnowledgeGraph& g, CentralityMeasure m,
                                 const StressConfig& config) {
  if (m == CentralityMeasure::PageRank) return pagerank(g, config.pagerank);
  return centrality(g, m);
}

}  // namespace

std::pair<double, std::set<std::string>> fabrication_rate(const KnowledgeGraph& g_llm,
                                                          const KnowledgeGraph& g_ref) {
  if (g_llm.node_count() == 0) throw EmptyGeneratedGraphError();
  std::set<std::string> fabricated;
  const auto ref_nodes = g_ref.node_set();
  for (const auto& [node, kind] : g_llm.nodes())
    if (!ref_nodes.contains(node)) fabricated.insert(node);
  const double rate =
      static_cast<double>(fabricated.size()) / static_cast<double>(g_llm.node_count());
  return {rate, std::move(fabricated)};
}

std::map<CentralityMeasure, MeasureCorrelation> structural_alignment(
    const KnowledgeGraph& g_llm, const KnowledgeGraph& g_ref,
    const std::vector<CentralityMeasure>& measures) {
  std::map<CentralityMeasure, MeasureCorrelation> out;
  StressConfig defaults;
  for (CentralityMeasure m : measures) {
    MeasureCorrelation mc;
    try {
      const CentralityVector llm = compute_measure(g_llm, m, defaults);
      const CentralityVector ref = compute_measure(g_ref, m, defaults);
      mc.value = spearman(llm.scores, ref.scores);
    } catch (const MetricsError&) {
      mc.value.reset();
    }
    out.emplace(m, mc);
  }
  return out;
}

std::vector<UpwardMobileNode> upward_mobility(const KnowledgeGraph& g_llm,
                                              const KnowledgeGraph& g_ref,
                                              CentralityMeasure measure, double threshold,
                                              double fabricated_top_percentile) {
  StressConfig defaults;
  const auto perc_llm = percentile_ranks(compute_measure(g_llm, measure, defaults));
  const auto perc_ref = percentile_ranks(compute_measure(g_ref, measure, defaults));

  std::vector<UpwardMobileNode> out;
  for (const auto& [node, pl] : perc_llm) {
    auto it = perc_ref.find(node);
    if (it != perc_ref.end()) {
      const double delta = pl - it->second;
      if (delta >= threshold)
        out.push_back({node, it->second, pl, delta, false});
    } else if (pl >= fabricated_top_percentile) {
      out.push_back({node, 0.0, pl, pl, true});
    }
  }
  std::sort(out.begin(), out.end(), [](const UpwardMobileNode& a, const UpwardMobileNode& b) {
    if (a.delta != b.delta) return a.delta > b.delta;
    return a.node < b.node;
  });
  return out;
}

StressReport run_stress_test(const KnowledgeGraph& g_llm, const KnowledgeGraph& g_ref,
                             const StressConfig& config) {
  StressReport report;
  report.config = config;

  auto [rate, fabricated] = fabrication_rate(g_llm, g_ref);
  report.fabrication_rate = rate;
  report.fabricated_nodes = std::move(fabricated);

  report.node_jaccard = jaccard(g_llm.node_set(), g_ref.node_set());
  report.edge_jaccard = jaccard_edges(g_llm.edge_set(), g_ref.edge_set());

  report.rank_correlations = structural_alignment(g_llm, g_ref, config.measures);

  const CommunityPartition part_ref = louvain_communities(g_ref, config.louvain_seed);
  const CommunityPartition part_llm = louvain_communities(g_llm, config.louvain_seed);
  report.modularity_ref = part_ref.modularity;
  report.modularity_llm = part_llm.modularity;
  report.community_counts = {part_ref.community_count(), part_llm.community_count()};

  report.upward_mobile =
      upward_mobility(g_llm, g_ref, config.mobility_measure, config.mobility_threshold,
                      config.fabricated_top_percentile);
  return report;
}

std::string StressReport::to_json() const {
  json j;
  j["config"] = {
      {"mobility_measure", std::string(to_string(config.mobility_measure))},
      {"mobility_threshold", config.mobility_threshold},
      {"fabricated_top_percentile", config.fabricated_top_percentile},
      {"louvain_seed", config.louvain_seed},
      {"pagerank_damping", config.pagerank.damping},
      {"pagerank_tol", config.pagerank.tol},
  };
  j["fabrication"] = {{"rate", fabrication_rate},
                      {"nodes", std::vector<std::string>(fabricated_nodes.begin(),
                                                         fabricated_nodes.end())}};
  j["jaccard"] = {{"nodes", node_jaccard}, {"edges", edge_jaccard}};
  json corr = json::object();
  for (const auto& [m, mc] : rank_correlations) {
    const std::string key{to_string(m)};
    if (mc.value)
      corr[key] = {{"rho", mc.value->rho}, {"n_shared", mc.value->n_shared}};
    else
      corr[key] = {{"error", "insufficient_overlap"}};
  }
  j["rank_correlations"] = corr;
  j["modularity"] = {{"reference", modularity_ref},
                     {"generated", modularity_llm},
                     {"communities_reference", community_counts.first},
                     {"communities_generated", community_counts.second}};
  json mobile = json::array();
  for (const auto& u : upward_mobile)
    mobile.push_back({{"node", u.node},
                      {"percentile_reference", u.percentile_ref},
                      {"percentile_generated", u.percentile_llm},
                      {"delta", u.delta},
                      {"fabricated", u.is_fabrication}});
  j["upward_mobility"] = mobile;
  return j.dump(2);
}

StressReport StressReport::from_json(const std::string& text) {
  const json j = json::parse(text);
  StressReport report;
  const json& cfg = j.at("config");
  const std::string m = cfg.value("mobility_measure", "pagerank");
  if (m == "degree") report.config.mobility_measure = CentralityMeasure::Degree;
  else if (m == "betweenness") report.config.mobility_measure = CentralityMeasure::Betweenness;
  else if (m == "eigenvector") report.config.mobility_measure = CentralityMeasure::Eigenvector;
  else report.config.mobility_measure = CentralityMeasure::PageRank;
  report.config.mobility_threshold = cfg.value("mobility_threshold", 0.25);
  report.config.fabricated_top_percentile = cfg.value("fabricated_top_percentile", 0.90);
  report.config.louvain_seed = cfg.value("louvain_seed", std::uint64_t{42});
  report.config.pagerank.damping = cfg.value("pagerank_damping", 0.85);
  report.config.pagerank.tol = cfg.value("pagerank_tol", 1e-10);

  report.fabrication_rate = j.at("fabrication").at("rate").get<double>();
  for (const auto& n : j.at("fabrication").at("nodes"))
    report.fabricated_nodes.insert(n.get<std::string>());
  report.node_jaccard = j.at("jaccard").at("nodes").get<double>();
  report.edge_jaccard = j.at("jaccard").at("edges").get<double>();
  report.config.measures.clear();
  for (const auto& [key, val] : j.at("rank_correlations").items()) {
    CentralityMeasure m = CentralityMeasure::PageRank;
    if (key == "degree") m = CentralityMeasure::Degree;
    else if (key == "betweenness") m = CentralityMeasure::Betweenness;
    else if (key == "eigenvector") m = CentralityMeasure::Eigenvector;
    report.config.measures.push_back(m);
    MeasureCorrelation mc;
    if (val.contains("rho"))
      mc.value = RankCorrelation{val.at("rho").get<double>(),
                                 val.at("n_shared").get<std::size_t>()};
    report.rank_correlations.emplace(m, mc);
  }
  const json& mod = j.at("modularity");
  report.modularity_ref = mod.at("reference").get<double>();
  report.modularity_llm = mod.at("generated").get<double>();
  report.community_counts = {mod.at("communities_reference").get<std::size_t>(),
                             mod.at("communities_generated").get<std::size_t>()};
  for (const auto& u : j.at("upward_mobility"))
    report.upward_mobile.push_back({u.at("node").get<std::string>(),
                                    u.at("percentile_reference").get<double>(),
                                    u.at("percentile_generated").get<double>(),
                                    u.at("delta").get<double>(),
                                    u.at("fabricated").get<bool>()});
  return report;
}

std::string StressReport::to_text_summary() const {
  std::ostringstream out;
  out << "structural divergence report\n";
  out << "============================\n";
  out << "1. reference graph: trusted knowledge organization system (see inputs)\n";
  out << "2. generated graph: parsed entities and typed relations (see inputs)\n";
  out << "3. fabrication rate: " << fabrication_rate << " (" << fabricated_nodes.size()
      << " generated-only nodes)\n";
  out << "4. rank correlations (shared nodes):\n";
  for (const auto& [m, mc] : rank_correlations) {
    out << "   - " << to_string(m) << ": ";
    if (mc.value)
      out << "rho=" << mc.value->rho << " over " << mc.value->n_shared << " nodes\n";
    else
      out << "insufficient overlap\n";
  }
  out << "5. community structure: modularity ref=" << modularity_ref
      << " gen=" << modularity_llm << ", communities ref=" << community_counts.first
      << " gen=" << community_counts.second << "\n";
  out << "6. upward mobility (threshold " << config.mobility_threshold << "): "
      << upward_mobile.size() << " nodes";
  std::size_t fabricated_mobile = 0;
  for (const auto& u : upward_mobile) fabricated_mobile += u.is_fabrication ? 1 : 0;
  out << " (" << fabricated_mobile << " fabricated)\n";
  out << "7. graph similarity: node jaccard=" << node_jaccard
      << ", edge jaccard=" << edge_jaccard << "\n";
  return out.str();
}

}  // namespace kgstress
