#include "kgstress/record_eval.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kgstress/graph.hpp"

namespace kgstress {

namespace {

using nlohmann::json;

std::vector<std::string> normalize_values(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& v : values) {
    std::string n = normalize_label(v);
    if (n.empty()) continue;
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(std::move(n));
  }
  return out;
}

bool iso_prefix_match(const std::string& a, const std::string& b) {
  const std::string& shorter = a.size() <= b.size() ? a : b;
  const std::string& longer = a.size() <= b.size() ? b : a;
  if (shorter.size() < 4) return false;
  if (longer.compare(0, shorter.size(), shorter) != 0) return false;
  // Year or longer ISO prefix followed by a component separator (or exact).
  return longer.size() == shorter.size() || longer[shorter.size()] == '-';
}

int pair_score(const std::string& truth, const std::string& generated, FieldType type) {
  switch (type) {
    case FieldType::Count:
      return truth == generated ? 100 : 0;
    case FieldType::Date:
      if (iso_prefix_match(truth, generated)) return 100;
      return token_set_ratio(truth, generated);
    case FieldType::Scalar:
    case FieldType::List:
      return token_set_ratio(truth, generated);
  }
  return 0;
}

}  // namespace

std::string_view to_string(FieldType t) {
  switch (t) {
    case FieldType::List: return "list";
    case FieldType::Scalar: return "scalar";
    case FieldType::Date: return "date";
    case FieldType::Count: return "count";
  }
  return "list";
}

std::optional<FieldType> field_type_from_string(std::string_view s) {
  if (s == "list") return FieldType::List;
  if (s == "scalar") return FieldType::Scalar;
  if (s == "date") return FieldType::Date;
  if (s == "count") return FieldType::Count;
  return std::nullopt;
}

const FieldSpec* Schema::find(std::string_view name) const {
  for (const auto& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

Schema Schema::from_json(const std::string& text) {
  const json j = json::parse(text);
  Schema s;
  s.benchmark = j.value("benchmark", "");
  for (const auto& f : j.at("fields")) {
    FieldSpec spec;
    spec.name = f.at("name").get<std::string>();
    auto type = field_type_from_string(f.value("type", "list"));
    if (!type) throw SchemaMismatchError("unknown field type for '" + spec.name + "'");
    spec.type = *type;
    s.fields.push_back(std::move(spec));
  }
  return s;
}

std::string Schema::to_json() const {
  json j;
  j["benchmark"] = benchmark;
  j["fields"] = json::array();
  for (const auto& f : fields)
    j["fields"].push_back({{"name", f.name}, {"type", std::string(to_string(f.type))}});
  return j.dump(2);
}

std::vector<RecordPair> load_record_pairs_jsonl(const std::string& text) {
  std::vector<RecordPair> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw EvalError("record line " + std::to_string(line_no) + ": invalid JSON");
    RecordPair pair;
    pair.entity_id = j.value("entity_id", "");
    for (const auto& [field, values] : j.at("fields").items()) {
      auto& slot = pair.field_values[field];
      if (values.contains("truth"))
        slot.first = values.at("truth").get<std::vector<std::string>>();
      if (values.contains("generated"))
        slot.second = values.at("generated").get<std::vector<std::string>>();
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::string record_pairs_to_jsonl(const std::vector<RecordPair>& pairs) {
  std::ostringstream out;
  for (const auto& p : pairs) {
    json fields = json::object();
    for (const auto& [name, values] : p.field_values)
      fields[name] = {{"truth", values.first}, {"generated", values.second}};
    out << json{{"entity_id", p.entity_id}, {"fields", fields}}.dump() << "\n";
  }
  return out.str();
}

MatchResult match_lists(const std::vector<std::string>& truth,
                        const std::vector<std::string>& generated, int threshold,
                        FieldType type) {
  const std::vector<std::string> t = normalize_values(truth);
  const std::vector<std::string> g = normalize_values(generated);

  std::vector<std::vector<int>> score(t.size(), std::vector<int>(g.size(), 0));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) score[i][j] = pair_score(t[i], g[j], type);

  std::vector<bool> t_used(t.size(), false), g_used(g.size(), false);
  MatchResult res;
  while (true) {
    int best = threshold - 1;
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t_used[i]) continue;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (g_used[j]) continue;
        if (score[i][j] > best) {
          best = score[i][j];
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;
    t_used[bi] = true;
    g_used[bj] = true;
    res.matched_pairs.emplace_back(t[bi], g[bj]);
  }
  res.tp = res.matched_pairs.size();
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!t_used[i]) res.unmatched_truth.push_back(t[i]);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (!g_used[j]) res.unmatched_generated.push_back(g[j]);
  res.fn = res.unmatched_truth.size();
  res.fp = res.unmatched_generated.size();
  return res;
}

CachedOracle::CachedOracle(std::string cache_path, bool cache_only,
                           std::unique_ptr<Oracle> upstream)
    : cache_path_(std::move(cache_path)),
      cache_only_(cache_only),
      upstream_(std::move(upstream)) {
  std::ifstream in(cache_path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    cache_[j.at("value").get<std::string>()] = j.at("known").get<bool>();
  }
}

OracleVerdict CachedOracle::lookup(const std::string& value) {
  auto it = cache_.find(value);
  if (it != cache_.end()) return {value, it->second};
  if (cache_only_ || upstream_ == nullptr)
    throw OracleUnavailableError("oracle cache miss for '" + value + "'");
  OracleVerdict v = upstream_->lookup(value);
  cache_[value] = v.known;
  dirty_ = true;
  return v;
}

void CachedOracle::flush() {
  if (!dirty_) return;
  std::ofstream out(cache_path_, std::ios::trunc);
  for (const auto& [value, known] : cache_)
    out << json{{"value", value}, {"known", known}}.dump() << "\n";
  dirty_ = false;
}

HallucinationSplit label_hallucinations(const std::vector<std::string>& fp_values,
                                        Oracle* oracle) {
  HallucinationSplit split;
  for (const auto& v : fp_values) {
    if (oracle == nullptr) {
      split.unverified.push_back(v);
      continue;
    }
    try {
      const OracleVerdict verdict = oracle->lookup(v);
      (verdict.known ? split.extra_knowledge : split.hallucinated).push_back(v);
    } catch (const OracleUnavailableError&) {
      split.unverified.push_back(v);
    }
  }
  return split;
}

std::vector<FieldEvalResult> evaluate_benchmark(const std::vector<RecordPair>& pairs,
                                                const Schema& schema, int threshold,
                                                Oracle* oracle) {
  for (const auto& p : pairs)
    for (const auto& [field, values] : p.field_values)
      if (schema.find(field) == nullptr)
        throw SchemaMismatchError("record '" + p.entity_id + "' carries field '" + field +
                                  "' not declared by schema '" + schema.benchmark + "'");

  std::vector<FieldEvalResult> out;
  for (const auto& spec : schema.fields) {
    FieldEvalResult result;
    result.field = spec.name;
    double p_sum = 0.0, r_sum = 0.0, f1_sum = 0.0;
    std::size_t exact = 0;
    std::vector<std::string> fp_values;
    for (const auto& pair : pairs) {
      static const std::pair<std::vector<std::string>, std::vector<std::string>> kEmpty;
      auto it = pair.field_values.find(spec.name);
      const auto& [truth, generated] = it == pair.field_values.end() ? kEmpty : it->second;
      const MatchResult m = match_lists(truth, generated, threshold, spec.type);
      result.tp += m.tp;
      result.fp += m.fp;
      result.fn += m.fn;
      const double p = (m.tp + m.fp) ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
      const double r = (m.tp + m.fn) ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
      p_sum += p;
      r_sum += r;
      f1_sum += (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
      if (m.fp == 0 && m.fn == 0) ++exact;
      fp_values.insert(fp_values.end(), m.unmatched_generated.begin(),
                       m.unmatched_generated.end());
    }
    const double n = pairs.empty() ? 1.0 : static_cast<double>(pairs.size());
    result.precision = p_sum / n;
    result.recall = r_sum / n;
    result.f1 = f1_sum / n;
    result.accuracy = static_cast<double>(exact) / n;
    if (spec.type == FieldType::List) {
      const HallucinationSplit split = label_hallucinations(fp_values, oracle);
      result.hallucinated = split.hallucinated.size();
      result.extra_knowledge = split.extra_knowledge.size();
      result.unverified = split.unverified.size();
    } else {
      // No oracle covers scalar-valued fields; unmatched values count as
      // hallucinated.
      result.hallucinated = fp_values.size();
    }
    out.push_back(std::move(result));
  }
  return out;
}

std::string field_results_to_json(const std::vector<FieldEvalResult>& results) {
  json arr = json::array();
  for (const auto& r : results)
    arr.push_back({{"field", r.field},
                   {"tp", r.tp},
                   {"fp", r.fp},
                   {"fn", r.fn},
                   {"precision", r.precision},
                   {"recall", r.recall},
                   {"f1", r.f1},
                   {"accuracy", r.accuracy},
                   {"hallucinated", r.hallucinated},
                   {"extra_knowledge", r.extra_knowledge},
                   {"unverified", r.unverified}});
  return arr.dump(2);
}

std::string field_results_to_csv(const std::vector<FieldEvalResult>& results) {
  std::ostringstream out;
  out << "field,tp,fp,fn,precision,recall,f1,accuracy,hallucinated,extra_knowledge,unverified\n";
  for (const auto& r : results)
    out << r.field << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.precision
        << ',' << r.recall << ',' << r.f1 << ',' << r.accuracy << ',' << r.hallucinated
        << ',' << r.extra_knowledge << ',' << r.unverified << "\n";
  return out.str();
}

}  // namespace kgstress
