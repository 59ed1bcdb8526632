#include "kgstress/fuzzy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace kgstress {

std::size_t indel_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t la = a.size(), lb = b.size();
  if (lb == 0) return la;
  std::vector<std::size_t> prev(lb + 1), cur(lb + 1);
  for (std::size_t j = 0; j <= lb; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= la; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= lb; ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1];
      else
        cur[j] = 1 + std::min(prev[j], cur[j - 1]);
    }
    prev.swap(cur);
  }
  return prev[lb];
}

int indel_similarity(std::string_view a, std::string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 100;
  const double norm = 1.0 - static_cast<double>(indel_distance(a, b)) / total;
  return static_cast<int>(std::lround(100.0 * norm));
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

int token_set_ratio(std::string_view a, std::string_view b) {
  const auto ta = whitespace_tokens(a);
  const auto tb = whitespace_tokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());

  std::vector<std::string> inter, only_a, only_b;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(inter));
  std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(),
                      std::back_inserter(only_a));
  std::set_difference(sb.begin(), sb.end(), sa.begin(), sa.end(),
                      std::back_inserter(only_b));

  auto join = [](const std::vector<std::string>& head,
                 const std::vector<std::string>& tail) {
    std::string out;
    for (const auto& t : head) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    for (const auto& t : tail) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    return out;
  };
  const std::string si = join(inter, {});
  const std::string d1 = join(inter, only_a);
  const std::string d2 = join(inter, only_b);

  int best = indel_similarity(d1, d2);
  if (!si.empty()) {
    best = std::max(best, indel_similarity(si, d1));
    best = std::max(best, indel_similarity(si, d2));
  }
  return best;
}

}  // namespace kgstress
