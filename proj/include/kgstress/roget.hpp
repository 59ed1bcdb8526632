#pragma once
// Parser for the 1911 Roget plain-text thesaurus: heads with
// part-of-speech term lists and cross-references, plus conversion to
// KnowledgeGraph fragments.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgstress/graph.hpp"

namespace kgstress {

struct NotRogetFormatError : std::runtime_error {
  NotRogetFormatError() : std::runtime_error("no thesaurus head markers found in input") {}
};
struct SampleTooLargeError : std::runtime_error {
  SampleTooLargeError(std::size_t n, std::size_t available)
      : std::runtime_error("sample size " + std::to_string(n) + " exceeds " +
                           std::to_string(available) + " available heads") {}
};

struct RogetHead {
  int number = 0;
  std::string title;
  std::vector<std::string> nouns;
  std::vector<std::string> verbs;
  std::vector<std::string> adjectives;
  std::vector<std::string> adverbs;
  std::vector<int> cross_refs;

  bool has_terms() const {
    return !(nouns.empty() && verbs.empty() && adjectives.empty() && adverbs.empty());
  }
};

struct RogetParseStats {
  std::size_t head_markers = 0;
  std::size_t skipped_invalid = 0;
};

// Strips parenthetical annotations, bracketed glosses, "&c." markers and
// numeral tokens, then lowercases and collapses whitespace. Returns
// nothing when the residue is empty. Idempotent.
std::optional<std::string> clean_term(std::string_view raw);

// Head numbers referenced inside a raw term string ("&c. 461", "(inquire) 461").
std::vector<int> extract_refs(std::string_view raw);

std::vector<RogetHead> parse_thesaurus(const std::string& text,
                                       RogetParseStats* stats = nullptr);

// Deterministic sample: SplitMix64-seeded shuffle, first n.
std::vector<RogetHead> sample_heads(const std::vector<RogetHead>& heads, std::size_t n,
                                    std::uint64_t seed = 42);

struct RogetGraphBuild {
  KnowledgeGraph graph;
  std::size_t dropped_cross_refs = 0;  // targets outside the sampled head set
};

RogetGraphBuild head_to_graph(const std::vector<RogetHead>& heads,
                              const std::string& name = "roget");

std::string heads_to_jsonl(const std::vector<RogetHead>& heads);
std::vector<RogetHead> heads_from_jsonl(const std::string& text);

}  // namespace kgstress
