#include "doctest.h"

#include <random>

#include "kgstress/graph.hpp"

using namespace kgstress;

TEST_CASE("labels normalize: case, trim, internal whitespace") {
  CHECK(normalize_label("  Hello   World  ") == "hello world");
  CHECK(normalize_label("ALPHA") == "alpha");
  CHECK(normalize_label("a\tb\nc") == "a b c");
  // idempotent
  CHECK(normalize_label(normalize_label("  X  y ")) == normalize_label("  X  y "));
}

TEST_CASE("node identity and kind conflicts") {
  KnowledgeGraph g("t");
  CHECK(g.add_node("  Exist ", NodeKind::Head) == "exist");
  CHECK(g.add_node("EXIST", NodeKind::Head) == "exist");  // no-op
  CHECK(g.node_count() == 1);
  CHECK_THROWS_AS(g.add_node("exist", NodeKind::Term), KindConflictError);
  CHECK_THROWS_AS(g.add_node("   ", NodeKind::Term), EmptyLabelError);
}

TEST_CASE("edges: endpoints required, duplicates collapse") {
  KnowledgeGraph g("t");
  g.add_node("a", NodeKind::Head);
  g.add_node("b", NodeKind::Term);
  CHECK_THROWS_AS(g.add_edge("a", "missing", EdgeKind::HasNoun), MissingEndpointError);
  g.add_edge("a", "b", EdgeKind::HasNoun);
  g.add_edge("A ", " b", EdgeKind::HasNoun);
  CHECK(g.edge_count() == 1);
  g.add_edge("a", "b", EdgeKind::HasVerb);  // distinct kind = distinct edge
  CHECK(g.edge_count() == 2);
}

TEST_CASE("schema-checked graphs reject ill-typed edges") {
  KnowledgeGraph g("t", /*schema_checked=*/true);
  g.add_node("h1", NodeKind::Head);
  g.add_node("h2", NodeKind::Head);
  g.add_node("t1", NodeKind::Term);
  g.add_edge("h1", "t1", EdgeKind::HasAdj);
  g.add_edge("h1", "h2", EdgeKind::CrossRef);
  CHECK_THROWS_AS(g.add_edge("t1", "h1", EdgeKind::HasNoun), SchemaViolationError);
  CHECK_THROWS_AS(g.add_edge("h1", "t1", EdgeKind::CrossRef), SchemaViolationError);
  CHECK_THROWS_AS(g.add_edge("t1", "h1", EdgeKind::Cites), SchemaViolationError);
}

namespace {

KnowledgeGraph random_graph(std::mt19937& rng, std::size_t n_nodes, std::size_t n_edges) {
  KnowledgeGraph g("rand");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    labels.push_back("n" + std::to_string(i));
    g.add_node(labels.back(), i % 3 == 0 ? NodeKind::Head : NodeKind::Term);
  }
  std::uniform_int_distribution<std::size_t> pick(0, n_nodes - 1);
  std::uniform_int_distribution<int> kind(0, 6);
  for (std::size_t i = 0; i < n_edges; ++i)
    g.add_edge(labels[pick(rng)], labels[pick(rng)],
               static_cast<EdgeKind>(kind(rng)));
  return g;
}

}  // namespace

TEST_CASE("export/import round-trips every format") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_graph(rng, 2 + trial, 3 * trial);
    for (auto fmt : {GraphFormat::GraphML, GraphFormat::DOT, GraphFormat::JSONL}) {
      const auto back = KnowledgeGraph::import_from(g.export_to(fmt), fmt);
      CHECK(back.same_structure(g));
    }
  }
}

TEST_CASE("round-trip survives awkward labels") {
  KnowledgeGraph g("q");
  g.add_node("a<b>&\"c\"", NodeKind::Head);
  g.add_node("d 'e'", NodeKind::Term);
  g.add_edge("a<b>&\"c\"", "d 'e'", EdgeKind::Generic);
  for (auto fmt : {GraphFormat::GraphML, GraphFormat::DOT, GraphFormat::JSONL}) {
    const auto back = KnowledgeGraph::import_from(g.export_to(fmt), fmt);
    CHECK(back.same_structure(g));
  }
}

TEST_CASE("import rejects malformed input with a line number") {
  CHECK_THROWS_AS(KnowledgeGraph::import_from("not json\n", GraphFormat::JSONL),
                  ParseError);
  CHECK_THROWS_AS(KnowledgeGraph::import_from("<node id=\"a\"/>\n", GraphFormat::GraphML),
                  ParseError);  // missing <graphml> root
  CHECK_THROWS_AS(
      KnowledgeGraph::import_from(
          "<graphml>\n<edge source=\"a\" target=\"b\"/>\n</graphml>\n",
          GraphFormat::GraphML),
      ParseError);  // edge endpoints never declared
  CHECK_THROWS_AS(KnowledgeGraph::import_from("graph {}\n", GraphFormat::DOT), ParseError);
  try {
    KnowledgeGraph::import_from("{\"graph\":\"g\"}\nbroken\n", GraphFormat::JSONL);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("random op sequences keep counts consistent") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    KnowledgeGraph g("ops");
    std::set<std::string> nodes;
    std::set<Edge> edges;
    std::uniform_int_distribution<int> op(0, 2);
    for (int step = 0; step < 200; ++step) {
      const std::string a = "v" + std::to_string(rng() % 20);
      const std::string b = "v" + std::to_string(rng() % 20);
      switch (op(rng)) {
        case 0:
          g.add_node(a, NodeKind::Term);
          nodes.insert(a);
          break;
        default:
          if (nodes.contains(a) && nodes.contains(b)) {
            g.add_edge(a, b, EdgeKind::Generic);
            edges.insert({a, b, EdgeKind::Generic});
          }
      }
    }
    CHECK(g.node_count() == nodes.size());
    CHECK(g.edge_count() == edges.size());
    CHECK(g.node_set() == nodes);
    CHECK(g.edge_set() == edges);
  }
}
