#pragma once
// Field-level evaluation of generated structured records against ground
// truth: fuzzy list matching, TP/FP/FN accounting, oracle-based
// hallucination labeling, and per-field macro-averaged metrics.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kgstress/fuzzy.hpp"

namespace kgstress {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaMismatchError : EvalError {
  using EvalError::EvalError;
};
struct OracleUnavailableError : EvalError {
  using EvalError::EvalError;
};

enum class FieldType { List, Scalar, Date, Count };
std::string_view to_string(FieldType t);
std::optional<FieldType> field_type_from_string(std::string_view s);

struct FieldSpec {
  std::string name;
  FieldType type = FieldType::List;
};

struct Schema {
  std::string benchmark;
  std::vector<FieldSpec> fields;

  const FieldSpec* find(std::string_view name) const;
  static Schema from_json(const std::string& text);
  std::string to_json() const;
};

struct RecordPair {
  std::string entity_id;
  // field name -> (truth values, generated values)
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>>
      field_values;
};

std::vector<RecordPair> load_record_pairs_jsonl(const std::string& text);
std::string record_pairs_to_jsonl(const std::vector<RecordPair>& pairs);

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<std::pair<std::string, std::string>> matched_pairs;  // (truth, generated)
  std::vector<std::string> unmatched_generated;
  std::vector<std::string> unmatched_truth;
};

// Greedy best-score one-to-one matching at the given token-set-ratio
// threshold. Values are normalized first; empties are dropped and
// duplicates collapsed.
MatchResult match_lists(const std::vector<std::string>& truth,
                        const std::vector<std::string>& generated, int threshold = 80,
                        FieldType type = FieldType::List);

struct OracleVerdict {
  std::string value;
  bool known = false;
};

// Third-party knowledge-base lookup used to separate genuine extra
// knowledge from hallucination among false positives. Implementations must
// be deterministic within a run (cache their answers).
class Oracle {
 public:
  virtual ~Oracle() = default;
  // Throws OracleUnavailableError when the backend cannot answer.
  virtual OracleVerdict lookup(const std::string& value) = 0;
};

// Replayable cache, one JSON object per line: {"value": ..., "known": ...}.
class CachedOracle : public Oracle {
 public:
  // cache_only: lookups outside the cache throw OracleUnavailableError.
  CachedOracle(std::string cache_path, bool cache_only, std::unique_ptr<Oracle> upstream);
  OracleVerdict lookup(const std::string& value) override;
  void flush();

 private:
  std::string cache_path_;
  bool cache_only_;
  std::unique_ptr<Oracle> upstream_;
  std::map<std::string, bool> cache_;
  bool dirty_ = false;
};

struct HallucinationSplit {
  std::vector<std::string> hallucinated;
  std::vector<std::string> extra_knowledge;
  std::vector<std::string> unverified;
};

HallucinationSplit label_hallucinations(const std::vector<std::string>& fp_values,
                                        Oracle* oracle);

struct FieldEvalResult {
  std::string field;
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
  std::size_t hallucinated = 0;
  std::size_t extra_knowledge = 0;
  std::size_t unverified = 0;
};

// Per-field macro-average of per-record precision/recall/F1 (0/0 -> 0);
// accuracy is the fraction of records whose normalized value lists match
// exactly. Entity-valued (list) fields consult the oracle for FP labeling;
// scalar-valued fields count unmatched values as hallucinated.
std::vector<FieldEvalResult> evaluate_benchmark(const std::vector<RecordPair>& pairs,
                                                const Schema& schema, int threshold = 80,
                                                Oracle* oracle = nullptr);

std::string field_results_to_json(const std::vector<FieldEvalResult>& results);
std::string field_results_to_csv(const std::vector<FieldEvalResult>& results);

}  // namespace kgstress
