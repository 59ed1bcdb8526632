#include "doctest.h"

#include <random>

#include "kgstress/stress.hpp"

using namespace kgstress;

namespace {

KnowledgeGraph chain_with_hub(int n) {
  KnowledgeGraph g("fix");
  for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i), NodeKind::Term);
  for (int i = 0; i + 1 < n; ++i)
    g.add_edge("n" + std::to_string(i), "n" + std::to_string(i + 1), EdgeKind::Generic);
  for (int i = 2; i < n; i += 3)
    g.add_edge("n0", "n" + std::to_string(i), EdgeKind::Generic);
  return g;
}

KnowledgeGraph random_graph(std::mt19937& rng, int n) {
  KnowledgeGraph g("rand");
  for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i), NodeKind::Term);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int i = 0; i < 3 * n; ++i)
    g.add_edge("n" + std::to_string(pick(rng)), "n" + std::to_string(pick(rng)),
               EdgeKind::Generic);
  return g;
}

}  // namespace

TEST_CASE("identity stress test: zero divergence on every fixture") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = trial == 0 ? chain_with_hub(12) : random_graph(rng, 5 + trial);
    const auto report = run_stress_test(g, g);
    CHECK(report.fabrication_rate == 0.0);
    CHECK(report.fabricated_nodes.empty());
    CHECK(report.node_jaccard == 1.0);
    CHECK(report.edge_jaccard == 1.0);
    for (const auto& [measure, corr] : report.rank_correlations) {
      REQUIRE(corr.value.has_value());
      CHECK(corr.value->rho == doctest::Approx(1.0));
    }
    CHECK(report.modularity_ref == doctest::Approx(report.modularity_llm));
    CHECK(report.community_counts.first == report.community_counts.second);
    CHECK(report.upward_mobile.empty());
  }
}

TEST_CASE("fabrication rate counts generated-only nodes") {
  KnowledgeGraph ref("ref"), llm("llm");
  ref.add_node("a", NodeKind::Term);
  ref.add_node("b", NodeKind::Term);
  llm.add_node("a", NodeKind::Term);
  llm.add_node("x", NodeKind::Term);
  llm.add_node("y", NodeKind::Term);
  const auto [rate, fabricated] = fabrication_rate(llm, ref);
  CHECK(rate == doctest::Approx(2.0 / 3.0));
  CHECK(fabricated == std::set<std::string>{"x", "y"});
  KnowledgeGraph empty("e");
  CHECK_THROWS_AS(fabrication_rate(empty, ref), EmptyGeneratedGraphError);
  // disjoint graphs: everything fabricated
  CHECK(fabrication_rate(llm, empty).first == 1.0);
}

TEST_CASE("fabrication rate is antitone in overlap") {
  KnowledgeGraph ref("ref");
  for (int i = 0; i < 10; ++i) ref.add_node("r" + std::to_string(i), NodeKind::Term);
  double prev = 1.1;
  for (int shared = 0; shared <= 10; ++shared) {
    KnowledgeGraph llm("llm");
    for (int i = 0; i < shared; ++i) llm.add_node("r" + std::to_string(i), NodeKind::Term);
    for (int i = shared; i < 10; ++i)
      llm.add_node("f" + std::to_string(i), NodeKind::Term);
    const double rate = fabrication_rate(llm, ref).first;
    CHECK(rate < prev);
    prev = rate;
  }
}

TEST_CASE("structural alignment degrades gracefully below two shared nodes") {
  KnowledgeGraph ref("ref"), llm("llm");
  ref.add_node("a", NodeKind::Term);
  ref.add_node("b", NodeKind::Term);
  ref.add_edge("a", "b", EdgeKind::Generic);
  llm.add_node("a", NodeKind::Term);
  llm.add_node("z", NodeKind::Term);
  llm.add_edge("a", "z", EdgeKind::Generic);
  const auto corr = structural_alignment(llm, ref, {CentralityMeasure::Degree});
  CHECK_FALSE(corr.at(CentralityMeasure::Degree).value.has_value());
}

TEST_CASE("upward mobility flags fabricated nodes that land on top") {
  // ref: star centered on hub; llm: same nodes but re-centered on a
  // fabricated node that now dominates
  KnowledgeGraph ref("ref"), llm("llm");
  for (int i = 0; i < 6; ++i) {
    ref.add_node("s" + std::to_string(i), NodeKind::Term);
    llm.add_node("s" + std::to_string(i), NodeKind::Term);
  }
  for (int i = 1; i < 6; ++i) ref.add_edge("s0", "s" + std::to_string(i), EdgeKind::Generic);
  llm.add_node("fake", NodeKind::Term);
  for (int i = 0; i < 6; ++i)
    llm.add_edge("fake", "s" + std::to_string(i), EdgeKind::Generic);
  const auto mobile =
      upward_mobility(llm, ref, CentralityMeasure::Betweenness, 0.25, 0.90);
  REQUIRE_FALSE(mobile.empty());
  bool saw_fake = false;
  for (const auto& m : mobile) {
    if (m.node == "fake") {
      saw_fake = true;
      CHECK(m.is_fabrication);
      CHECK(m.percentile_llm >= 0.90);
    }
  }
  CHECK(saw_fake);
  // sorted by delta descending
  for (std::size_t i = 1; i < mobile.size(); ++i)
    CHECK(mobile[i - 1].delta >= mobile[i].delta);
}

TEST_CASE("report serialization round-trips") {
  std::mt19937 rng(67);
  const auto ref = chain_with_hub(15);
  const auto llm = random_graph(rng, 12);
  const auto report = run_stress_test(llm, ref);
  const auto back = StressReport::from_json(report.to_json());
  CHECK(back.to_json() == report.to_json());
  CHECK(back.fabrication_rate == report.fabrication_rate);
  CHECK(back.node_jaccard == report.node_jaccard);
  CHECK(back.rank_correlations.size() == report.rank_correlations.size());
  CHECK(back.upward_mobile.size() == report.upward_mobile.size());
  // the text summary mentions the headline numbers
  const auto text = report.to_text_summary();
  CHECK(text.find("fabrication rate") != std::string::npos);
  CHECK(text.find("jaccard") != std::string::npos);
}

TEST_CASE("stress report is deterministic for a fixed config") {
  std::mt19937 rng(71);
  const auto ref = random_graph(rng, 20);
  const auto llm = random_graph(rng, 18);
  CHECK(run_stress_test(llm, ref).to_json() == run_stress_test(llm, ref).to_json());
}
