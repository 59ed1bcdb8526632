#include "kgstress/roget.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kgstress/rng.hpp"

namespace kgstress {

namespace {

using nlohmann::json;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Drops "(...)" and "[...]" spans (nesting tolerated, unclosed spans run
// to end of string).
std::string strip_spans(std::string_view s, char open, char close) {
  std::string out;
  int depth = 0;
  for (char c : s) {
    if (c == open) {
      ++depth;
    } else if (c == close) {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      out += c;
    }
  }
  return out;
}

std::string strip_etc(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&' && i + 1 < s.size() && s[i + 1] == 'c') {
      i += 2;
      if (i < s.size() && s[i] == '.') ++i;
      out += ' ';
      continue;
    }
    out += s[i++];
  }
  return out;
}

std::string drop_numeral_tokens(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::string token, out;
  while (in >> token) {
    bool has_digit = std::any_of(token.begin(), token.end(),
                                 [](char c) { return is_digit(c); });
    if (has_digit) continue;
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

// Head start: "#N." or "#Na." at line start (leading whitespace allowed).
// Returns the offset just past the dot, or npos.
std::size_t head_marker(const std::string& line, std::string& number_text) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (i >= line.size() || line[i] != '#') return std::string::npos;
  ++i;
  std::size_t start = i;
  while (i < line.size() && line[i] != '.' && line[i] != ' ') ++i;
  if (i >= line.size() || line[i] != '.' || i == start) return std::string::npos;
  number_text = line.substr(start, i - start);
  return i + 1;
}

struct Section {
  EdgeKind kind;    // HasNoun/HasVerb/HasAdj/HasAdv, Generic for ignored POS
  std::string text;
};

// Recognized POS markers. "Int."/"Phr." sections are parsed but their
// terms are discarded (the benchmark covers only the four main POS).
const std::map<std::string, EdgeKind, std::less<>> kMarkers = {
    {"N.", EdgeKind::HasNoun},   {"V.", EdgeKind::HasVerb},
    {"Adj.", EdgeKind::HasAdj},  {"Adv.", EdgeKind::HasAdv},
    {"Int.", EdgeKind::Generic}, {"Phr.", EdgeKind::Generic},
};

bool marker_at(const std::string& text, std::size_t pos, EdgeKind& kind,
               std::size_t& len) {
  for (const auto& [m, k] : kMarkers) {
    if (text.compare(pos, m.size(), m) == 0 &&
        (pos + m.size() >= text.size() || text[pos + m.size()] == ' ')) {
      kind = k;
      len = m.size();
      return true;
    }
  }
  return false;
}

// A marker counts only at the start of the body, at the start of a source
// line, or right after "--"; "Adj." in running prose does not open a section.
std::vector<Section> split_sections(const std::string& body) {
  std::vector<Section> sections;
  auto open = [&](EdgeKind kind) { sections.push_back({kind, ""}); };
  std::size_t i = 0;
  bool at_boundary = true;
  while (i < body.size()) {
    if (at_boundary) {
      while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
      EdgeKind kind;
      std::size_t len;
      if (i < body.size() && marker_at(body, i, kind, len)) {
        open(kind);
        i += len;
        at_boundary = false;
        continue;
      }
      at_boundary = false;
    }
    if (body[i] == '\n') {
      at_boundary = true;
      if (!sections.empty()) sections.back().text += ' ';
      ++i;
      continue;
    }
    if (body[i] == '-' && i + 1 < body.size() && body[i + 1] == '-') {
      i += 2;
      at_boundary = true;
      if (!sections.empty()) sections.back().text += ' ';
      continue;
    }
    if (!sections.empty()) sections.back().text += body[i];
    ++i;
  }
  return sections;
}

void harvest(const Section& section, RogetHead& head) {
  std::vector<std::string>* bucket = nullptr;
  switch (section.kind) {
    case EdgeKind::HasNoun: bucket = &head.nouns; break;
    case EdgeKind::HasVerb: bucket = &head.verbs; break;
    case EdgeKind::HasAdj: bucket = &head.adjectives; break;
    case EdgeKind::HasAdv: bucket = &head.adverbs; break;
    default: break;
  }
  std::string current;
  auto flush = [&] {
    for (int ref : extract_refs(current)) head.cross_refs.push_back(ref);
    if (bucket != nullptr) {
      if (auto term = clean_term(current)) {
        if (std::find(bucket->begin(), bucket->end(), *term) == bucket->end())
          bucket->push_back(*term);
      }
    }
    current.clear();
  };
  for (char c : section.text) {
    if (c == ',' || c == ';' || c == '.') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
}

}  // namespace

std::optional<std::string> clean_term(std::string_view raw) {
  std::string s = strip_spans(raw, '(', ')');
  s = strip_spans(s, '[', ']');
  s = strip_etc(s);
  s = drop_numeral_tokens(s);
  s = normalize_label(s);
  // residual punctuation-only fragments ("--", quotes) are noise
  const bool has_letter = std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalpha(c) != 0;
  });
  if (!has_letter) return std::nullopt;
  return s;
}

std::vector<int> extract_refs(std::string_view raw) {
  std::vector<int> refs;
  for (std::size_t i = 0; i < raw.size();) {
    if (!is_digit(raw[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < raw.size() && is_digit(raw[i])) ++i;
    // trailing letter ("102a") marks a lettered sub-head; the numeric part
    // is still the reference target
    if (i - start <= 4) {
      int value = std::stoi(std::string(raw.substr(start, i - start)));
      if (value >= 1 && value <= 1000) refs.push_back(value);
    }
  }
  return refs;
}

std::vector<RogetHead> parse_thesaurus(const std::string& text, RogetParseStats* stats) {
  RogetParseStats local;
  std::vector<std::pair<std::string, std::string>> raw_heads;  // number text, body
  {
    std::istringstream in(text);
    std::string line;
    std::string* body = nullptr;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string number_text;
      const std::size_t after = head_marker(line, number_text);
      if (after != std::string::npos) {
        raw_heads.emplace_back(number_text, line.substr(after) + "\n");
        body = &raw_heads.back().second;
        ++local.head_markers;
        continue;
      }
      if (body != nullptr) *body += line + "\n";
    }
  }
  if (raw_heads.empty()) throw NotRogetFormatError();

  std::vector<RogetHead> heads;
  for (auto& [number_text, body] : raw_heads) {
    // number: digits with an optional trailing sub-head letter (ignored)
    std::string digits = number_text;
    if (!digits.empty() && std::isalpha(static_cast<unsigned char>(digits.back())))
      digits.pop_back();
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return is_digit(c); })) {
      ++local.skipped_invalid;
      continue;
    }

    RogetHead head;
    head.number = std::stoi(digits);

    // title runs to the first "--" (or the whole first line)
    const std::size_t dash = body.find("--");
    const std::size_t eol = body.find('\n');
    const std::size_t title_end = std::min(dash, eol);
    std::string title = body.substr(0, title_end);
    if (!title.empty() && title.back() == '.') title.pop_back();
    head.title = clean_term(title).value_or("");

    for (const auto& section : split_sections(body.substr(title_end)))
      harvest(section, head);

    std::sort(head.cross_refs.begin(), head.cross_refs.end());
    head.cross_refs.erase(std::unique(head.cross_refs.begin(), head.cross_refs.end()),
                          head.cross_refs.end());
    head.cross_refs.erase(
        std::remove(head.cross_refs.begin(), head.cross_refs.end(), head.number),
        head.cross_refs.end());

    if (head.title.empty() || !head.has_terms()) {
      ++local.skipped_invalid;
      continue;
    }
    heads.push_back(std::move(head));
  }
  if (stats != nullptr) *stats = local;
  return heads;
}

std::vector<RogetHead> sample_heads(const std::vector<RogetHead>& heads, std::size_t n,
                                    std::uint64_t seed) {
  if (n > heads.size()) throw SampleTooLargeError(n, heads.size());
  std::vector<RogetHead> pool = heads;
  seeded_shuffle(pool, seed);
  pool.resize(n);
  std::sort(pool.begin(), pool.end(),
            [](const RogetHead& a, const RogetHead& b) { return a.number < b.number; });
  return pool;
}

RogetGraphBuild head_to_graph(const std::vector<RogetHead>& heads,
                              const std::string& name) {
  RogetGraphBuild build;
  build.graph = KnowledgeGraph(name, /*schema_checked=*/true);
  std::map<int, std::string> head_labels;
  for (const auto& h : heads)
    head_labels[h.number] = build.graph.add_node(h.title, NodeKind::Head);

  auto attach = [&](const RogetHead& h, const std::vector<std::string>& terms,
                    EdgeKind kind) {
    for (const auto& t : terms) {
      if (t == normalize_label(h.title)) continue;  // head label is already a node
      if (!build.graph.has_node(t)) build.graph.add_node(t, NodeKind::Term);
      if (build.graph.kind_of(t) == NodeKind::Term)
        build.graph.add_edge(h.title, t, kind);
    }
  };
  for (const auto& h : heads) {
    attach(h, h.nouns, EdgeKind::HasNoun);
    attach(h, h.verbs, EdgeKind::HasVerb);
    attach(h, h.adjectives, EdgeKind::HasAdj);
    attach(h, h.adverbs, EdgeKind::HasAdv);
    for (int ref : h.cross_refs) {
      auto it = head_labels.find(ref);
      if (it == head_labels.end()) {
        ++build.dropped_cross_refs;
        continue;
      }
      build.graph.add_edge(head_labels[h.number], it->second, EdgeKind::CrossRef);
    }
  }
  return build;
}

std::string heads_to_jsonl(const std::vector<RogetHead>& heads) {
  std::ostringstream out;
  for (const auto& h : heads) {
    out << json{{"number", h.number},
                {"title", h.title},
                {"nouns", h.nouns},
                {"verbs", h.verbs},
                {"adjectives", h.adjectives},
                {"adverbs", h.adverbs},
                {"cross_refs", h.cross_refs}}
               .dump()
        << "\n";
  }
  return out.str();
}

std::vector<RogetHead> heads_from_jsonl(const std::string& text) {
  std::vector<RogetHead> heads;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw ParseError(line_no, "invalid head record");
    RogetHead h;
    h.number = j.value("number", 0);
    h.title = j.value("title", "");
    h.nouns = j.value("nouns", std::vector<std::string>{});
    h.verbs = j.value("verbs", std::vector<std::string>{});
    h.adjectives = j.value("adjectives", std::vector<std::string>{});
    h.adverbs = j.value("adverbs", std::vector<std::string>{});
    h.cross_refs = j.value("cross_refs", std::vector<int>{});
    heads.push_back(std::move(h));
  }
  return heads;
}

}  // namespace kgstress
