#pragma once
// Centrality, community, similarity, and rank-correlation measures over
// KnowledgeGraph.
//
// PageRank and degree honor edge direction; betweenness, eigenvector,
// Louvain, and modularity operate on the undirected projection (self-loops
// dropped, reciprocal edges collapsed).

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgstress/graph.hpp"

namespace kgstress {

enum class CentralityMeasure { Degree, Betweenness, PageRank, Eigenvector };
std::string_view to_string(CentralityMeasure m);

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyGraphError : MetricsError {
  EmptyGraphError() : MetricsError("operation undefined on an empty graph") {}
};
struct UncoveredNodeError : MetricsError {
  explicit UncoveredNodeError(const std::string& label)
      : MetricsError("node '" + label + "' missing from community assignment") {}
};
struct InsufficientOverlapError : MetricsError {
  InsufficientOverlapError()
      : MetricsError("rank correlation needs at least 2 shared keys") {}
};

struct CentralityVector {
  CentralityMeasure measure;
  std::map<std::string, double> scores;
  bool converged = true;
};

struct CommunityPartition {
  std::map<std::string, int> assignment;
  double modularity = 0.0;
  std::size_t community_count() const;
};

struct RankCorrelation {
  double rho = 0.0;
  std::size_t n_shared = 0;
};

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-10;
  std::size_t max_iter = 1000;
};

struct PowerIterOptions {
  double tol = 1e-12;
  std::size_t max_iter = 1000;
};

CentralityVector degree_centrality(const KnowledgeGraph& g, bool normalized = false);
CentralityVector betweenness_centrality(const KnowledgeGraph& g, bool normalized = false);
CentralityVector pagerank(const KnowledgeGraph& g, PageRankOptions opts = {});
CentralityVector eigenvector_centrality(const KnowledgeGraph& g, PowerIterOptions opts = {});
CentralityVector centrality(const KnowledgeGraph& g, CentralityMeasure m);

CommunityPartition louvain_communities(const KnowledgeGraph& g, std::uint64_t seed = 42);
double modularity(const KnowledgeGraph& g, const std::map<std::string, int>& assignment);

// jaccard({}, {}) = 1.0: two empty sets are identical.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);
double jaccard_edges(const std::set<Edge>& a, const std::set<Edge>& b);

// Computed over the key intersection; ties receive average ranks.
RankCorrelation spearman(const std::map<std::string, double>& xs,
                         const std::map<std::string, double>& ys);

// Average-tie ranks of a score vector, rank 1 = smallest. Exposed for the
// percentile arithmetic in the stress test.
std::vector<double> average_ranks(const std::vector<double>& values);

}  // namespace kgstress
