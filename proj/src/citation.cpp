#include "kgstress/citation.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"
#include "kgstress/fuzzy.hpp"

namespace kgstress {

namespace {

using nlohmann::json;

std::string first_author_surname(const std::vector<std::string>& authors) {
  if (authors.empty()) return "";
  const auto tokens = whitespace_tokens(authors.front());
  return tokens.empty() ? "" : tokens.back();
}

}  // namespace

std::string citation_key(const std::vector<std::string>& authors, const std::string& title,
                         std::optional<int> year) {
  std::string key = first_author_surname(authors);
  key += '|';
  key += normalize_label(title);
  key += '|';
  key += year ? std::to_string(*year) : "";
  return key;
}

std::string BibRecord::key() const {
  return id.empty() ? citation_key(authors, title, year) : id;
}

std::vector<BibRecord> load_bib_records_jsonl(const std::string& text) {
  std::vector<BibRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw EvalError("bib record line " + std::to_string(line_no) + ": invalid JSON");
    BibRecord r;
    r.id = j.value("id", "");
    r.authors = j.value("authors", std::vector<std::string>{});
    r.title = j.value("title", "");
    if (j.contains("year") && !j.at("year").is_null()) r.year = j.at("year").get<int>();
    if (j.contains("doi") && !j.at("doi").is_null())
      r.doi = j.at("doi").get<std::string>();
    r.pub_type = j.value("type", "");
    if (j.contains("date") && !j.at("date").is_null())
      r.date = j.at("date").get<std::string>();
    r.concepts = j.value("concepts", std::vector<std::string>{});
    r.research_areas = j.value("research_areas", std::vector<std::string>{});
    if (j.contains("times_cited") && !j.at("times_cited").is_null())
      r.times_cited = j.at("times_cited").get<std::int64_t>();
    r.citations = j.value("citations", std::vector<std::string>{});
    if (r.year && (*r.year < 1400 || *r.year > 2100))
      throw EvalError("bib record line " + std::to_string(line_no) +
                      ": year out of range");
    if (r.times_cited && *r.times_cited < 0)
      throw EvalError("bib record line " + std::to_string(line_no) +
                      ": negative times_cited");
    out.push_back(std::move(r));
  }
  return out;
}

std::string bib_records_to_jsonl(const std::vector<BibRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    json j{{"id", r.id},
           {"authors", r.authors},
           {"title", r.title},
           {"type", r.pub_type},
           {"concepts", r.concepts},
           {"research_areas", r.research_areas},
           {"citations", r.citations}};
    if (r.year) j["year"] = *r.year;
    if (r.doi) j["doi"] = *r.doi;
    if (r.date) j["date"] = *r.date;
    if (r.times_cited) j["times_cited"] = *r.times_cited;
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string_view to_string(DoiStatus s) {
  switch (s) {
    case DoiStatus::Valid: return "valid";
    case DoiStatus::Broken: return "broken";
    case DoiStatus::Empty: return "empty";
  }
  return "empty";
}

DoiStatus validate_doi(const std::optional<std::string>& doi) {
  if (!doi) return DoiStatus::Empty;
  std::string_view s = *doi;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return DoiStatus::Empty;
  if (!s.starts_with("10.")) return DoiStatus::Broken;
  s.remove_prefix(3);
  std::size_t digits = 0;
  while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
  if (digits < 4 || digits > 9) return DoiStatus::Broken;
  s.remove_prefix(digits);
  if (s.empty() || s.front() != '/') return DoiStatus::Broken;
  s.remove_prefix(1);
  if (s.empty()) return DoiStatus::Broken;
  for (unsigned char c : s)
    if (std::isspace(c)) return DoiStatus::Broken;
  return DoiStatus::Valid;
}

CitationRecallStats citation_recall(
    const std::map<std::string, std::vector<std::string>>& truth,
    const std::map<std::string, std::vector<std::string>>& generated, int threshold) {
  CitationRecallStats stats;
  stats.paper_count = truth.size();
  for (const auto& [paper, truth_citations] : truth) {
    static const std::vector<std::string> kEmpty;
    auto it = generated.find(paper);
    const auto& gen_citations = it == generated.end() ? kEmpty : it->second;
    const MatchResult m = match_lists(truth_citations, gen_citations, threshold);
    stats.truth_total += m.tp + m.fn;
    stats.generated_total += m.tp + m.fp;
    stats.matched += m.tp;
    if (!gen_citations.empty()) ++stats.papers_with_citations;
  }
  stats.recall = stats.truth_total
                     ? static_cast<double>(stats.matched) / stats.truth_total
                     : 0.0;
  stats.omission = 1.0 - stats.recall;
  return stats;
}

Schema bibliographic_schema() {
  Schema s;
  s.benchmark = "bibliographic";
  s.fields = {{"date", FieldType::Date},          {"doi", FieldType::Scalar},
              {"type", FieldType::Scalar},        {"times_cited", FieldType::Count},
              {"concepts", FieldType::List},      {"research_areas", FieldType::List},
              {"citations", FieldType::List}};
  return s;
}

std::vector<RecordPair> align_bib_records(const std::vector<BibRecord>& truth,
                                          const std::vector<BibRecord>& generated) {
  std::map<std::string, const BibRecord*> gen_by_key;
  for (const auto& r : generated) gen_by_key[r.key()] = &r;

  auto lift = [](const BibRecord* r, bool truth_side, RecordPair& pair) {
    if (r == nullptr) return;
    auto set = [&](const std::string& field, std::vector<std::string> values) {
      auto& slot = pair.field_values[field];
      (truth_side ? slot.first : slot.second) = std::move(values);
    };
    set("date", r->date ? std::vector<std::string>{*r->date} : std::vector<std::string>{});
    set("doi", r->doi ? std::vector<std::string>{*r->doi} : std::vector<std::string>{});
    set("type", r->pub_type.empty() ? std::vector<std::string>{}
                                    : std::vector<std::string>{r->pub_type});
    set("times_cited", r->times_cited
                           ? std::vector<std::string>{std::to_string(*r->times_cited)}
                           : std::vector<std::string>{});
    set("concepts", r->concepts);
    set("research_areas", r->research_areas);
    set("citations", r->citations);
  };

  std::vector<RecordPair> pairs;
  for (const auto& t : truth) {
    RecordPair pair;
    pair.entity_id = t.key();
    lift(&t, true, pair);
    auto it = gen_by_key.find(t.key());
    lift(it == gen_by_key.end() ? nullptr : it->second, false, pair);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<FieldEvalResult> bib_field_eval(const std::vector<RecordPair>& pairs,
                                            const Schema& schema, int threshold,
                                            Oracle* oracle) {
  return evaluate_benchmark(pairs, schema, threshold, oracle);
}

KnowledgeGraph citation_graph(const std::vector<BibRecord>& records,
                              const std::string& name) {
  KnowledgeGraph g(name, /*schema_checked=*/true);
  for (const auto& r : records) g.add_node(r.key(), NodeKind::Head);
  for (const auto& r : records) {
    for (const auto& cited : r.citations) {
      const std::string cited_id = normalize_label(cited);
      if (cited_id.empty()) continue;
      if (!g.has_node(cited_id)) g.add_node(cited_id, NodeKind::Term);
      g.add_edge(r.key(), cited_id, EdgeKind::Cites);
    }
  }
  return g;
}

ConcentrationStats author_concentration(const std::vector<BibRecord>& records,
                                        std::size_t k) {
  ConcentrationStats stats;
  stats.k = k;
  std::size_t total = 0;
  for (const auto& r : records) {
    for (const auto& cited : r.citations) {
      const std::string key = normalize_label(cited);
      const auto bar = key.find('|');
      const std::string author = bar == std::string::npos ? key : key.substr(0, bar);
      if (author.empty()) continue;
      ++stats.frequency[author];
      ++total;
    }
  }
  std::vector<std::size_t> counts;
  for (const auto& [author, count] : stats.frequency) counts.push_back(count);
  std::sort(counts.rbegin(), counts.rend());
  std::size_t top = 0;
  for (std::size_t i = 0; i < counts.size() && i < k; ++i) top += counts[i];
  stats.top_k_share = total ? static_cast<double>(top) / total : 0.0;
  return stats;
}

std::string CitationAudit::to_json() const {
  json j;
  j["recall"] = {{"truth_total", recall.truth_total},
                 {"generated_total", recall.generated_total},
                 {"matched", recall.matched},
                 {"recall", recall.recall},
                 {"omission", recall.omission},
                 {"papers_with_citations", recall.papers_with_citations},
                 {"paper_count", recall.paper_count}};
  j["doi_status"] = doi_histogram;
  j["fields"] = json::parse(field_results_to_json(field_results));
  j["generated_author_concentration"] = {
      {"k", generated_concentration.k},
      {"top_k_share", generated_concentration.top_k_share}};
  return j.dump(2);
}

CitationAudit run_citation_audit(const std::vector<BibRecord>& truth,
                                 const std::vector<BibRecord>& generated, int threshold,
                                 Oracle* oracle) {
  CitationAudit audit;

  std::map<std::string, std::vector<std::string>> truth_citations, gen_citations;
  std::map<std::string, const BibRecord*> gen_by_key;
  for (const auto& r : generated) gen_by_key[r.key()] = &r;
  for (const auto& t : truth) {
    truth_citations[t.key()] = t.citations;
    auto it = gen_by_key.find(t.key());
    gen_citations[t.key()] =
        it == gen_by_key.end() ? std::vector<std::string>{} : it->second->citations;
  }
  audit.recall = citation_recall(truth_citations, gen_citations, threshold);

  for (const auto& t : truth) {
    auto it = gen_by_key.find(t.key());
    const DoiStatus status =
        validate_doi(it == gen_by_key.end() ? std::nullopt : it->second->doi);
    ++audit.doi_histogram[std::string(to_string(status))];
  }

  audit.field_results =
      bib_field_eval(align_bib_records(truth, generated), bibliographic_schema(),
                     threshold, oracle);
  audit.generated_concentration = author_concentration(generated);
  return audit;
}

}  // namespace kgstress
