#pragma once
// Token-set fuzzy string similarity (0..100) and the indel edit distance
// it is built on.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgstress {

// Insert/delete-only edit distance (no substitutions).
std::size_t indel_distance(std::string_view a, std::string_view b);

// round(100 * (1 - indel / (|a| + |b|))); 100 when both empty.
int indel_similarity(std::string_view a, std::string_view b);

std::vector<std::string> whitespace_tokens(std::string_view s);

// Token-set ratio: compare the sorted token-set intersection string against
// the two intersection-plus-difference strings and take the best pairwise
// indel similarity.
int token_set_ratio(std::string_view a, std::string_view b);

}  // namespace kgstress
