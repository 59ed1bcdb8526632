#pragma once
// Directed, typed-node, typed-edge knowledge graph shared by all analyses.
//
// Node identity is the normalized label; the kind (head vs term) is an
// attribute and conflicting re-registration is an error. Duplicate edges
// collapse: every metric downstream is defined on simple graphs.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace kgstress {

enum class NodeKind : std::uint8_t { Head, Term };
enum class EdgeKind : std::uint8_t {
  HasNoun,
  HasVerb,
  HasAdj,
  HasAdv,
  CrossRef,
  Cites,
  Generic
};

std::string_view to_string(NodeKind k);
std::string_view to_string(EdgeKind k);
std::optional<NodeKind> node_kind_from_string(std::string_view s);
std::optional<EdgeKind> edge_kind_from_string(std::string_view s);

// Unicode-aware-enough lowercase (ASCII fold), trim, collapse internal
// whitespace. Idempotent.
std::string normalize_label(std::string_view raw);

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyLabelError : GraphError {
  EmptyLabelError() : GraphError("node label empty after normalization") {}
};
struct KindConflictError : GraphError {
  explicit KindConflictError(const std::string& label)
      : GraphError("node '" + label + "' already registered with a different kind") {}
};
struct MissingEndpointError : GraphError {
  explicit MissingEndpointError(const std::string& label)
      : GraphError("edge endpoint '" + label + "' is not in the graph") {}
};
struct SchemaViolationError : GraphError {
  using GraphError::GraphError;
};
struct ParseError : GraphError {
  ParseError(std::size_t line, const std::string& what)
      : GraphError("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct Edge {
  std::string src;
  std::string dst;
  EdgeKind kind;
  auto operator<=>(const Edge&) const = default;
};

enum class GraphFormat { GraphML, DOT, JSONL };

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(std::string name, bool schema_checked = false)
      : name_(std::move(name)), schema_checked_(schema_checked) {}

  // Returns the normalized node id. Re-adding an existing label with the
  // same kind is a no-op; with a different kind it throws.
  std::string add_node(std::string_view label, NodeKind kind);

  // Endpoints must exist; duplicates are dropped silently.
  void add_edge(std::string_view src, std::string_view dst, EdgeKind kind);

  bool has_node(std::string_view label) const;
  std::optional<NodeKind> kind_of(std::string_view label) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::set<std::string> node_set() const;
  const std::set<Edge>& edge_set() const { return edges_; }
  const std::map<std::string, NodeKind>& nodes() const { return nodes_; }

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  bool schema_checked() const { return schema_checked_; }

  std::string export_to(GraphFormat format) const;
  static KnowledgeGraph import_from(std::string_view bytes, GraphFormat format);

  bool same_structure(const KnowledgeGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  void check_schema(const std::string& src, const std::string& dst, EdgeKind kind) const;

  std::string name_;
  bool schema_checked_ = false;
  std::map<std::string, NodeKind> nodes_;
  std::set<Edge> edges_;
};

}  // namespace kgstress
