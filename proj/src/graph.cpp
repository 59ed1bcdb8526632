#include "kgstress/graph.hpp"

#include <cctype>
#include <sstream>

#include "json.hpp"

namespace kgstress {

namespace {

using nlohmann::json;

constexpr std::string_view kNodeKindNames[] = {"head", "term"};
constexpr std::string_view kEdgeKindNames[] = {"has_noun", "has_verb", "has_adj",
                                               "has_adv",  "cross_ref", "cites",
                                               "generic"};

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    auto rest = s.substr(i);
    if (rest.starts_with("&amp;")) { out += '&'; i += 4; }
    else if (rest.starts_with("&lt;")) { out += '<'; i += 3; }
    else if (rest.starts_with("&gt;")) { out += '>'; i += 3; }
    else if (rest.starts_with("&quot;")) { out += '"'; i += 5; }
    else if (rest.starts_with("&apos;")) { out += '\''; i += 5; }
    else out += s[i];
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Pulls attr="value" out of a single tag. Values were emitted by us, so
// quoting is double-quote only.
std::optional<std::string> attr_value(std::string_view tag, std::string_view attr) {
  std::string needle = std::string(attr) + "=\"";
  auto pos = tag.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  pos += needle.size();
  auto end = tag.find('"', pos);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(tag.substr(pos, end - pos));
}

struct LineReader {
  std::string_view bytes;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::optional<std::string_view> next() {
    if (pos >= bytes.size()) return std::nullopt;
    auto nl = bytes.find('\n', pos);
    std::string_view line;
    if (nl == std::string_view::npos) {
      line = bytes.substr(pos);
      pos = bytes.size();
    } else {
      line = bytes.substr(pos, nl - pos);
      pos = nl + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    return line;
  }
};

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(NodeKind k) { return kNodeKindNames[static_cast<int>(k)]; }
std::string_view to_string(EdgeKind k) { return kEdgeKindNames[static_cast<int>(k)]; }

std::optional<NodeKind> node_kind_from_string(std::string_view s) {
  for (int i = 0; i < 2; ++i)
    if (s == kNodeKindNames[i]) return static_cast<NodeKind>(i);
  return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view s) {
  for (int i = 0; i < 7; ++i)
    if (s == kEdgeKindNames[i]) return static_cast<EdgeKind>(i);
  return std::nullopt;
}

std::string normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string KnowledgeGraph::add_node(std::string_view label, NodeKind kind) {
  std::string id = normalize_label(label);
  if (id.empty()) throw EmptyLabelError();
  auto [it, inserted] = nodes_.emplace(id, kind);
  if (!inserted && it->second != kind) throw KindConflictError(id);
  return id;
}

void KnowledgeGraph::check_schema(const std::string& src, const std::string& dst,
                                  EdgeKind kind) const {
  NodeKind sk = nodes_.at(src);
  NodeKind dk = nodes_.at(dst);
  switch (kind) {
    case EdgeKind::HasNoun:
    case EdgeKind::HasVerb:
    case EdgeKind::HasAdj:
    case EdgeKind::HasAdv:
      if (sk != NodeKind::Head || dk != NodeKind::Term)
        throw SchemaViolationError("pos edge must connect head -> term: '" + src +
                                   "' -> '" + dst + "'");
      break;
    case EdgeKind::CrossRef:
      if (sk != NodeKind::Head || dk != NodeKind::Head)
        throw SchemaViolationError("cross_ref edge must connect head -> head: '" + src +
                                   "' -> '" + dst + "'");
      break;
    case EdgeKind::Cites:
      if (sk != NodeKind::Head)
        throw SchemaViolationError("cites edge must originate at a head node: '" + src + "'");
      break;
    case EdgeKind::Generic:
      break;
  }
}

void KnowledgeGraph::add_edge(std::string_view src, std::string_view dst, EdgeKind kind) {
  std::string s = normalize_label(src);
  std::string d = normalize_label(dst);
  if (!nodes_.contains(s)) throw MissingEndpointError(s);
  if (!nodes_.contains(d)) throw MissingEndpointError(d);
  if (schema_checked_) check_schema(s, d, kind);
  edges_.insert(Edge{std::move(s), std::move(d), kind});
}

bool KnowledgeGraph::has_node(std::string_view label) const {
  return nodes_.contains(normalize_label(label));
}

std::optional<NodeKind> KnowledgeGraph::kind_of(std::string_view label) const {
  auto it = nodes_.find(normalize_label(label));
  if (it == nodes_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> KnowledgeGraph::node_set() const {
  std::set<std::string> out;
  for (const auto& [id, kind] : nodes_) out.insert(id);
  return out;
}

std::string KnowledgeGraph::export_to(GraphFormat format) const {
  std::ostringstream out;
  switch (format) {
    case GraphFormat::GraphML: {
      out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
      out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
      out << "<key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n";
      out << "<key id=\"rel\" for=\"edge\" attr.name=\"rel\" attr.type=\"string\"/>\n";
      out << "<graph id=\"" << xml_escape(name_) << "\" edgedefault=\"directed\">\n";
      for (const auto& [id, kind] : nodes_)
        out << "<node id=\"" << xml_escape(id) << "\"><data key=\"kind\">"
            << to_string(kind) << "</data></node>\n";
      for (const auto& e : edges_)
        out << "<edge source=\"" << xml_escape(e.src) << "\" target=\""
            << xml_escape(e.dst) << "\"><data key=\"rel\">" << to_string(e.kind)
            << "</data></edge>\n";
      out << "</graph>\n</graphml>\n";
      break;
    }
    case GraphFormat::DOT: {
      out << "digraph \"" << dot_escape(name_.empty() ? "g" : name_) << "\" {\n";
      for (const auto& [id, kind] : nodes_)
        out << "  \"" << dot_escape(id) << "\" [kind=\"" << to_string(kind) << "\"];\n";
      for (const auto& e : edges_)
        out << "  \"" << dot_escape(e.src) << "\" -> \"" << dot_escape(e.dst)
            << "\" [rel=\"" << to_string(e.kind) << "\"];\n";
      out << "}\n";
      break;
    }
    case GraphFormat::JSONL: {
      if (!name_.empty()) out << json{{"graph", name_}}.dump() << "\n";
      for (const auto& [id, kind] : nodes_)
        out << json{{"node", id}, {"kind", std::string(to_string(kind))}}.dump() << "\n";
      for (const auto& e : edges_)
        out << json{{"edge", {e.src, e.dst, std::string(to_string(e.kind))}}}.dump()
            << "\n";
      break;
    }
  }
  return out.str();
}

namespace {

KnowledgeGraph import_jsonl(std::string_view bytes) {
  KnowledgeGraph g;
  LineReader reader{bytes};
  while (auto line = reader.next()) {
    auto text = trim_view(*line);
    if (text.empty()) continue;
    json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      throw ParseError(reader.line_no, "not a JSON object");
    if (obj.contains("graph")) {
      g.set_name(obj.at("graph").get<std::string>());
    } else if (obj.contains("node")) {
      auto kind = node_kind_from_string(obj.value("kind", "term"));
      if (!kind) throw ParseError(reader.line_no, "unknown node kind");
      g.add_node(obj.at("node").get<std::string>(), *kind);
    } else if (obj.contains("edge")) {
      const auto& arr = obj.at("edge");
      if (!arr.is_array() || arr.size() != 3)
        throw ParseError(reader.line_no, "edge must be [src, dst, rel]");
      auto kind = edge_kind_from_string(arr[2].get<std::string>());
      if (!kind) throw ParseError(reader.line_no, "unknown edge kind");
      const std::string src = arr[0].get<std::string>();
      const std::string dst = arr[1].get<std::string>();
      if (!g.has_node(src)) throw ParseError(reader.line_no, "edge source not declared");
      if (!g.has_node(dst)) throw ParseError(reader.line_no, "edge target not declared");
      g.add_edge(src, dst, *kind);
    } else {
      throw ParseError(reader.line_no, "expected a node, edge, or graph object");
    }
  }
  return g;
}

KnowledgeGraph import_graphml(std::string_view bytes) {
  KnowledgeGraph g;
  LineReader reader{bytes};
  bool saw_graphml = false;
  while (auto line = reader.next()) {
    auto text = trim_view(*line);
    if (text.empty()) continue;
    if (text.find("<graphml") != std::string_view::npos) saw_graphml = true;
    if (text.starts_with("<graph ")) {
      if (auto id = attr_value(text, "id")) g.set_name(xml_unescape(*id));
    } else if (text.starts_with("<node ")) {
      auto id = attr_value(text, "id");
      if (!id) throw ParseError(reader.line_no, "node without id");
      std::string kind_str = "term";
      auto kpos = text.find("key=\"kind\">");
      if (kpos != std::string_view::npos) {
        auto rest = text.substr(kpos + 11);
        kind_str = std::string(rest.substr(0, rest.find('<')));
      }
      auto kind = node_kind_from_string(kind_str);
      if (!kind) throw ParseError(reader.line_no, "unknown node kind '" + kind_str + "'");
      g.add_node(xml_unescape(*id), *kind);
    } else if (text.starts_with("<edge ")) {
      auto src = attr_value(text, "source");
      auto dst = attr_value(text, "target");
      if (!src || !dst) throw ParseError(reader.line_no, "edge without endpoints");
      std::string rel_str = "generic";
      auto rpos = text.find("key=\"rel\">");
      if (rpos != std::string_view::npos) {
        auto rest = text.substr(rpos + 10);
        rel_str = std::string(rest.substr(0, rest.find('<')));
      }
      auto kind = edge_kind_from_string(rel_str);
      if (!kind) throw ParseError(reader.line_no, "unknown edge rel '" + rel_str + "'");
      try {
        g.add_edge(xml_unescape(*src), xml_unescape(*dst), *kind);
      } catch (const MissingEndpointError& e) {
        throw ParseError(reader.line_no, e.what());
      }
    }
  }
  if (!saw_graphml) throw ParseError(1, "missing <graphml> root element");
  return g;
}

KnowledgeGraph import_dot(std::string_view bytes) {
  KnowledgeGraph g;
  LineReader reader{bytes};
  bool in_graph = false;
  auto read_quoted = [&](std::string_view text, std::size_t& pos) -> std::string {
    if (pos >= text.size() || text[pos] != '"')
      throw ParseError(reader.line_no, "expected quoted identifier");
    std::string out;
    for (++pos; pos < text.size(); ++pos) {
      if (text[pos] == '\\' && pos + 1 < text.size()) {
        out += text[++pos];
      } else if (text[pos] == '"') {
        ++pos;
        return out;
      } else {
        out += text[pos];
      }
    }
    throw ParseError(reader.line_no, "unterminated quoted identifier");
  };
  while (auto line = reader.next()) {
    auto text = trim_view(*line);
    if (text.empty()) continue;
    if (text.starts_with("digraph")) {
      in_graph = true;
      auto q = text.find('"');
      if (q != std::string_view::npos) {
        std::size_t pos = q;
        g.set_name(read_quoted(text, pos));
      }
      continue;
    }
    if (text == "}") break;
    if (!in_graph) throw ParseError(reader.line_no, "statement outside digraph block");
    std::size_t pos = 0;
    std::string first = read_quoted(text, pos);
    auto rest = trim_view(text.substr(pos));
    if (rest.starts_with("->")) {
      pos = 0;
      auto arrow_rest = trim_view(rest.substr(2));
      std::string second = read_quoted(arrow_rest, pos);
      std::string rel_str{"generic"};
      if (auto rel = attr_value(arrow_rest.substr(pos), "rel")) rel_str = *rel;
      auto kind = edge_kind_from_string(rel_str);
      if (!kind) throw ParseError(reader.line_no, "unknown edge rel '" + rel_str + "'");
      try {
        g.add_edge(first, second, *kind);
      } catch (const MissingEndpointError& e) {
        throw ParseError(reader.line_no, e.what());
      }
    } else {
      std::string kind_str{"term"};
      if (auto kind = attr_value(rest, "kind")) kind_str = *kind;
      auto kind = node_kind_from_string(kind_str);
      if (!kind) throw ParseError(reader.line_no, "unknown node kind '" + kind_str + "'");
      g.add_node(first, *kind);
    }
  }
  if (!in_graph) throw ParseError(1, "missing digraph header");
  return g;
}

}  // namespace

KnowledgeGraph KnowledgeGraph::import_from(std::string_view bytes, GraphFormat format) {
  switch (format) {
    case GraphFormat::GraphML: return import_graphml(bytes);
    case GraphFormat::DOT: return import_dot(bytes);
    case GraphFormat::JSONL: return import_jsonl(bytes);
  }
  throw GraphError("unknown graph format");
}

}  // namespace kgstress
