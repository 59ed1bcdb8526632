#pragma once
// Bibliographic integrity: citation recall/omission, DOI syntax
// validation, field-level bibliographic comparison, and citation-graph
// construction for the structural stress test.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgstress/graph.hpp"
#include "kgstress/record_eval.hpp"

namespace kgstress {

struct BibRecord {
  std::string id;  // optional explicit key; citation_key(record) otherwise
  std::vector<std::string> authors;
  std::string title;
  std::optional<int> year;
  std::optional<std::string> doi;
  std::string pub_type;
  std::optional<std::string> date;  // ISO
  std::vector<std::string> concepts;
  std::vector<std::string> research_areas;
  std::optional<std::int64_t> times_cited;
  std::vector<std::string> citations;  // normalized author|title|year keys

  std::string key() const;  // id when set, else citation key
};

// "first-author-surname|title|year", lowercased.
std::string citation_key(const std::vector<std::string>& authors, const std::string& title,
                         std::optional<int> year);

std::vector<BibRecord> load_bib_records_jsonl(const std::string& text);
std::string bib_records_to_jsonl(const std::vector<BibRecord>& records);

enum class DoiStatus { Valid, Broken, Empty };
std::string_view to_string(DoiStatus s);

// Valid iff "10." + 4-9 digit registrant + "/" + non-empty suffix with no
// whitespace. Existence in a registry is out of scope.
DoiStatus validate_doi(const std::optional<std::string>& doi);

struct CitationRecallStats {
  std::size_t truth_total = 0;
  std::size_t generated_total = 0;
  std::size_t matched = 0;
  double recall = 0.0;
  double omission = 0.0;
  std::size_t papers_with_citations = 0;  // papers with >= 1 generated citation
  std::size_t paper_count = 0;
};

CitationRecallStats citation_recall(
    const std::map<std::string, std::vector<std::string>>& truth,
    const std::map<std::string, std::vector<std::string>>& generated, int threshold = 80);

// Delegates to the record evaluator with the bibliographic schema:
// times_cited exact, date with year-prefix tolerance.
std::vector<FieldEvalResult> bib_field_eval(const std::vector<RecordPair>& pairs,
                                            const Schema& schema, int threshold = 80,
                                            Oracle* oracle = nullptr);

Schema bibliographic_schema();

// Aligns truth and generated records by key and lifts them into the
// generic field-evaluation representation.
std::vector<RecordPair> align_bib_records(const std::vector<BibRecord>& truth,
                                          const std::vector<BibRecord>& generated);

// Paper nodes (head kind), cited-work nodes (term kind), cites edges.
KnowledgeGraph citation_graph(const std::vector<BibRecord>& records,
                              const std::string& name = "citations");

struct ConcentrationStats {
  std::map<std::string, std::size_t> frequency;
  double top_k_share = 0.0;
  std::size_t k = 0;
};

// Frequency of cited first-author keys with the share captured by the
// top-k entries.
ConcentrationStats author_concentration(const std::vector<BibRecord>& records,
                                        std::size_t k = 5);

struct CitationAudit {
  CitationRecallStats recall;
  std::map<std::string, std::size_t> doi_histogram;  // status -> count (generated side)
  std::vector<FieldEvalResult> field_results;
  ConcentrationStats generated_concentration;

  std::string to_json() const;
};

CitationAudit run_citation_audit(const std::vector<BibRecord>& truth,
                                 const std::vector<BibRecord>& generated,
                                 int threshold = 80, Oracle* oracle = nullptr);

}  // namespace kgstress
