#include "doctest.h"

#include <fstream>
#include <sstream>

#include "kgstress/citation.hpp"
#include "kgstress/stress.hpp"

using namespace kgstress;

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(KGSTRESS_FIXTURES) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("citation keys normalize author, title, and year") {
  CHECK(citation_key({"Immanuel Kant"}, "Critique of Pure Reason", 1781) ==
        "kant|critique of pure reason|1781");
  CHECK(citation_key({"A B", "C D"}, "Title", 2000) == "b|title|2000");
  CHECK(citation_key({}, "Anonymous Work", std::nullopt) == "|anonymous work|");
}

TEST_CASE("bib records round-trip through jsonl and validate ranges") {
  BibRecord r;
  r.id = "p1";
  r.authors = {"Jane Roe"};
  r.title = "A Study";
  r.year = 1999;
  r.doi = "10.1234/xyz";
  r.pub_type = "journal-article";
  r.times_cited = 12;
  r.citations = {"roe|earlier work|1990"};
  const auto back = load_bib_records_jsonl(bib_records_to_jsonl({r}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].key() == "p1");
  CHECK(back[0].doi == "10.1234/xyz");
  CHECK(back[0].times_cited == 12);
  CHECK_THROWS_AS(load_bib_records_jsonl("{\"id\":\"x\",\"year\":1200}\n"), EvalError);
  CHECK_THROWS_AS(load_bib_records_jsonl("{\"id\":\"x\",\"times_cited\":-1}\n"), EvalError);
  // without an explicit id, the key is derived
  BibRecord anon = r;
  anon.id.clear();
  CHECK(anon.key() == "roe|a study|1999");
}

TEST_CASE("doi validation: valid, broken, empty") {
  CHECK(validate_doi("10.1234/abc") == DoiStatus::Valid);
  CHECK(validate_doi("10.123456789/x.y-z") == DoiStatus::Valid);
  CHECK(validate_doi(" 10.5555/padded ") == DoiStatus::Valid);
  CHECK(validate_doi("10.123/short-registrant") == DoiStatus::Broken);
  CHECK(validate_doi("10.1234567890/too-long") == DoiStatus::Broken);
  CHECK(validate_doi("11.1234/wrong-prefix") == DoiStatus::Broken);
  CHECK(validate_doi("10.1234") == DoiStatus::Broken);
  CHECK(validate_doi("10.1234/") == DoiStatus::Broken);
  CHECK(validate_doi("10.1234/has space") == DoiStatus::Broken);
  CHECK(validate_doi("doi:10.1234/abc") == DoiStatus::Broken);
  CHECK(validate_doi(std::nullopt) == DoiStatus::Empty);
  CHECK(validate_doi("") == DoiStatus::Empty);
  CHECK(validate_doi("   ") == DoiStatus::Empty);
}

TEST_CASE("citation recall arithmetic and invariants") {
  std::map<std::string, std::vector<std::string>> truth{
      {"p1", {"a|x|2000", "b|y|2001", "c|z|2002"}},
      {"p2", {"d|w|2003"}},
  };
  std::map<std::string, std::vector<std::string>> generated{
      {"p1", {"a|x|2000"}},
  };
  const auto stats = citation_recall(truth, generated);
  CHECK(stats.truth_total == 4);
  CHECK(stats.matched == 1);
  CHECK(stats.recall == doctest::Approx(0.25));
  CHECK(stats.recall + stats.omission == doctest::Approx(1.0));
  CHECK(stats.papers_with_citations == 1);
  CHECK(stats.paper_count == 2);

  // monotone: adding a generated citation never decreases recall
  auto more = generated;
  more["p2"].push_back("d|w|2003");
  CHECK(citation_recall(truth, more).recall >= stats.recall);

  // identical sides: full recall, zero omission
  const auto perfect = citation_recall(truth, truth);
  CHECK(perfect.recall == doctest::Approx(1.0));
  CHECK(perfect.omission == doctest::Approx(0.0));

  // empty generated side entirely
  const auto nothing = citation_recall(truth, {});
  CHECK(nothing.recall == 0.0);
  CHECK(nothing.papers_with_citations == 0);
}

TEST_CASE("citation graph: papers + distinct cited works, cites edges") {
  BibRecord p1, p2;
  p1.id = "p1";
  p1.citations = {"a|x|2000", "b|y|2001"};
  p2.id = "p2";
  p2.citations = {"a|x|2000"};  // shared cited work
  const auto g = citation_graph({p1, p2});
  CHECK(g.node_count() == 4);  // |papers| + |distinct cited keys|
  CHECK(g.edge_count() == 3);
  CHECK(g.kind_of("p1") == NodeKind::Head);
  CHECK(g.kind_of("a|x|2000") == NodeKind::Term);
  // isolated papers stay isolated
  BibRecord lonely;
  lonely.id = "solo";
  const auto g2 = citation_graph({lonely});
  CHECK(g2.node_count() == 1);
  CHECK(g2.edge_count() == 0);
}

TEST_CASE("author concentration measures top-k share of cited authors") {
  BibRecord p;
  p.id = "p";
  p.citations = {"smith|a|1990", "smith|b|1991", "smith|c|1992", "jones|d|1993"};
  const auto stats = author_concentration({p}, 1);
  CHECK(stats.frequency.at("smith") == 3);
  CHECK(stats.top_k_share == doctest::Approx(0.75));
}

TEST_CASE("full audit on the committed fixture reproduces the headline numbers") {
  const auto truth = load_bib_records_jsonl(fixture("bib_truth.jsonl"));
  const auto generated = load_bib_records_jsonl(fixture("bib_generated.jsonl"));
  const auto audit = run_citation_audit(truth, generated);
  CHECK(audit.recall.truth_total == 654);
  CHECK(audit.recall.matched == 53);
  CHECK(audit.recall.recall == doctest::Approx(0.081).epsilon(0.01));
  CHECK(audit.recall.papers_with_citations == 14);
  CHECK(audit.recall.paper_count == 50);
  double type_f1 = -1, doi_f1 = -1;
  for (const auto& f : audit.field_results) {
    if (f.field == "type") type_f1 = f.f1;
    if (f.field == "doi") doi_f1 = f.f1;
  }
  CHECK(type_f1 == doctest::Approx(0.70).epsilon(0.01));
  CHECK(doi_f1 == doctest::Approx(0.01).scale(1).epsilon(0.03));
  CHECK(audit.doi_histogram.at("valid") > 0);
  CHECK(audit.doi_histogram.at("broken") > 0);
  CHECK(audit.doi_histogram.at("empty") > 0);
  // consistency with the structural stress test on the induced graphs
  const auto report =
      run_stress_test(citation_graph(generated, "gen"), citation_graph(truth, "ref"));
  // every generated citation in this fixture copies a truth key, so the
  // generated graph introduces no new nodes; divergence shows up as missing
  // coverage (low jaccard), not fabrication
  CHECK(report.fabrication_rate == 0.0);
  CHECK(report.node_jaccard < 1.0);
  CHECK(report.node_jaccard > 0.0);
}
