#include "kgstress/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_set>

#include "kgstress/kernels.hpp"
#include "kgstress/rng.hpp"

namespace kgstress {

namespace {

struct IndexedGraph {
  std::vector<std::string> labels;           // sorted
  std::vector<std::vector<int>> out;         // directed successors
  std::vector<std::vector<int>> in;          // directed predecessors
  std::vector<std::vector<int>> undirected;  // unique neighbors, self-loops dropped
  std::size_t undirected_edge_count = 0;

  explicit IndexedGraph(const KnowledgeGraph& g) {
    labels.reserve(g.node_count());
    std::map<std::string, int> index;
    for (const auto& [id, kind] : g.nodes()) {
      index.emplace(id, static_cast<int>(labels.size()));
      labels.push_back(id);
    }
    const int n = static_cast<int>(labels.size());
    out.resize(n);
    in.resize(n);
    std::vector<std::set<int>> und(n);
    for (const auto& e : g.edge_set()) {
      int s = index.at(e.src);
      int d = index.at(e.dst);
      out[s].push_back(d);
      in[d].push_back(s);
      if (s != d) {
        und[s].insert(d);
        und[d].insert(s);
      }
    }
    undirected.resize(n);
    std::size_t degree_sum = 0;
    for (int i = 0; i < n; ++i) {
      undirected[i].assign(und[i].begin(), und[i].end());
      degree_sum += undirected[i].size();
    }
    undirected_edge_count = degree_sum / 2;
  }

  int size() const { return static_cast<int>(labels.size()); }
};

std::map<std::string, double> to_score_map(const IndexedGraph& ig,
                                           const std::vector<double>& values) {
  std::map<std::string, double> out;
  for (int i = 0; i < ig.size(); ++i) out.emplace(ig.labels[i], values[i]);
  return out;
}

}  // namespace

std::string_view to_string(CentralityMeasure m) {
  switch (m) {
    case CentralityMeasure::Degree: return "degree";
    case CentralityMeasure::Betweenness: return "betweenness";
    case CentralityMeasure::PageRank: return "pagerank";
    case CentralityMeasure::Eigenvector: return "eigenvector";
  }
  return "unknown";
}

std::size_t CommunityPartition::community_count() const {
  std::unordered_set<int> ids;
  for (const auto& [node, c] : assignment) ids.insert(c);
  return ids.size();
}

CentralityVector degree_centrality(const KnowledgeGraph& g, bool normalized) {
  if (g.node_count() == 0) throw EmptyGraphError();
  IndexedGraph ig(g);
  const int n = ig.size();
  std::vector<double> deg(n, 0.0);
  for (int i = 0; i < n; ++i)
    deg[i] = static_cast<double>(ig.out[i].size() + ig.in[i].size());
  if (normalized && n > 1)
    kernels::scale(1.0 / (n - 1), deg);
  return {CentralityMeasure::Degree, to_score_map(ig, deg)};
}

CentralityVector betweenness_centrality(const KnowledgeGraph& g, bool normalized) {
  if (g.node_count() == 0) throw EmptyGraphError();
  IndexedGraph ig(g);
  const int n = ig.size();
  std::vector<double> bc(n, 0.0);

  // Brandes accumulation over the undirected projection. Sources are
  // processed in sorted-label order so sums are reproducible.
  std::vector<int> sigma(n), dist(n);
  std::vector<double> delta(n);
  std::vector<std::vector<int>> preds(n);
  std::vector<int> stack;
  stack.reserve(n);
  for (int s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0);
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    stack.clear();
    sigma[s] = 1;
    dist[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      stack.push_back(v);
      for (int w : ig.undirected[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      int w = *it;
      for (int v : preds[w])
        delta[v] += static_cast<double>(sigma[v]) / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both endpoints.
  kernels::scale(0.5, bc);
  if (normalized && n > 2)
    kernels::scale(2.0 / (static_cast<double>(n - 1) * (n - 2)), bc);
  return {CentralityMeasure::Betweenness, to_score_map(ig, bc)};
}

CentralityVector pagerank(const KnowledgeGraph& g, PageRankOptions opts) {
  if (g.node_count() == 0) throw EmptyGraphError();
  IndexedGraph ig(g);
  const int n = ig.size();
  const double d = opts.damping;
  std::vector<double> rank(n, 1.0 / n), next(n);
  bool converged = false;
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    double dangling = 0.0;
    for (int i = 0; i < n; ++i)
      if (ig.out[i].empty()) dangling += rank[i];
    std::fill(next.begin(), next.end(), (1.0 - d) / n + d * dangling / n);
    for (int i = 0; i < n; ++i) {
      if (ig.out[i].empty()) continue;
      const double share = d * rank[i] / static_cast<double>(ig.out[i].size());
      for (int j : ig.out[i]) next[j] += share;
    }
    const double change = kernels::l1_diff(rank, next);
    rank.swap(next);
    if (change < opts.tol) {
      converged = true;
      break;
    }
  }
  // Renormalize away accumulated rounding so the distribution sums to 1.
  const double total = kernels::sum(rank);
  if (total > 0) kernels::scale(1.0 / total, rank);
  return {CentralityMeasure::PageRank, to_score_map(ig, rank), converged};
}

CentralityVector eigenvector_centrality(const KnowledgeGraph& g, PowerIterOptions opts) {
  if (g.node_count() == 0) throw EmptyGraphError();
  IndexedGraph ig(g);
  const int n = ig.size();
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  bool converged = false;
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    // Iterate with A + I: same eigenvectors, but the shift breaks the
    // oscillation that plain power iteration hits on bipartite graphs.
    std::copy(x.begin(), x.end(), next.begin());
    for (int i = 0; i < n; ++i)
      for (int j : ig.undirected[i]) next[i] += x[j];
    double norm = kernels::l2_norm(next);
    if (norm == 0.0) {
      converged = true;
      break;
    }
    kernels::scale(1.0 / norm, next);
    const double change = kernels::l1_diff(x, next);
    x.swap(next);
    if (change < opts.tol) {
      converged = true;
      break;
    }
  }
  return {CentralityMeasure::Eigenvector, to_score_map(ig, x), converged};
}

CentralityVector centrality(const KnowledgeGraph& g, CentralityMeasure m) {
  switch (m) {
    case CentralityMeasure::Degree: return degree_centrality(g);
    case CentralityMeasure::Betweenness: return betweenness_centrality(g);
    case CentralityMeasure::PageRank: return pagerank(g);
    case CentralityMeasure::Eigenvector: return eigenvector_centrality(g);
  }
  throw MetricsError("unknown centrality measure");
}

double modularity(const KnowledgeGraph& g, const std::map<std::string, int>& assignment) {
  IndexedGraph ig(g);
  const int n = ig.size();
  std::vector<int> comm(n);
  for (int i = 0; i < n; ++i) {
    auto it = assignment.find(ig.labels[i]);
    if (it == assignment.end()) throw UncoveredNodeError(ig.labels[i]);
    comm[i] = it->second;
  }
  const double m = static_cast<double>(ig.undirected_edge_count);
  if (m == 0.0) return 0.0;
  std::map<int, double> internal, degree_sum;
  for (int i = 0; i < n; ++i) {
    degree_sum[comm[i]] += static_cast<double>(ig.undirected[i].size());
    for (int j : ig.undirected[i])
      if (j > i && comm[j] == comm[i]) internal[comm[i]] += 1.0;
  }
  double q = 0.0;
  for (const auto& [c, dsum] : degree_sum) {
    const double ec = internal.count(c) ? internal.at(c) : 0.0;
    const double frac = dsum / (2.0 * m);
    q += ec / m - frac * frac;
  }
  return q;
}

namespace {

// One Louvain level over a weighted graph. Returns the node -> community
// assignment (renumbered densely) or nothing if no node moved.
struct LevelGraph {
  // adjacency[i] = list of (neighbor, weight); self-loops stored once with
  // their full internal weight.
  std::vector<std::vector<std::pair<int, double>>> adjacency;
  std::vector<double> self_loop;
  double total_weight_2m = 0.0;  // sum of degrees incl. self-loops twice
};

bool louvain_level(const LevelGraph& lg, std::uint64_t seed, std::vector<int>& out_comm) {
  const int n = static_cast<int>(lg.adjacency.size());
  std::vector<int> comm(n);
  std::iota(comm.begin(), comm.end(), 0);
  std::vector<double> degree(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, w] : lg.adjacency[i]) degree[i] += w;
    degree[i] += 2.0 * lg.self_loop[i];
  }
  std::vector<double> comm_total = degree;  // sum of degrees per community
  const double two_m = lg.total_weight_2m;
  if (two_m == 0.0) {
    out_comm = comm;
    return false;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  seeded_shuffle(order, seed);

  bool any_move = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int u : order) {
      const int old_comm = comm[u];
      // Weight from u to each neighboring community.
      std::map<int, double> links;
      links[old_comm] += 0.0;
      for (const auto& [v, w] : lg.adjacency[u])
        if (v != u) links[comm[v]] += w;
      comm_total[old_comm] -= degree[u];
      const double base_gain =
          links[old_comm] - comm_total[old_comm] * degree[u] / two_m;
      int target = old_comm;
      for (const auto& [c, w_uc] : links) {
        if (c == old_comm) continue;
        const double gain = w_uc - comm_total[c] * degree[u] / two_m;
        if (gain > base_gain + 1e-12) {
          target = c;
          break;  // first strictly improving move
        }
      }
      comm_total[target] += degree[u];
      if (target != old_comm) {
        comm[u] = target;
        moved = true;
        any_move = true;
      }
    }
  }

  // Renumber densely in order of first appearance.
  std::map<int, int> renumber;
  out_comm.resize(n);
  for (int i = 0; i < n; ++i) {
    auto [it, inserted] = renumber.emplace(comm[i], static_cast<int>(renumber.size()));
    out_comm[i] = it->second;
  }
  return any_move;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& comm, int n_comm) {
  LevelGraph next;
  next.adjacency.resize(n_comm);
  next.self_loop.assign(n_comm, 0.0);
  next.total_weight_2m = lg.total_weight_2m;
  std::vector<std::map<int, double>> weights(n_comm);
  for (std::size_t i = 0; i < lg.adjacency.size(); ++i) {
    const int ci = comm[i];
    next.self_loop[ci] += lg.self_loop[i];
    for (const auto& [j, w] : lg.adjacency[i]) {
      const int cj = comm[j];
      if (ci == cj) {
        // Every undirected edge appears in both endpoint lists.
        next.self_loop[ci] += w / 2.0;
      } else {
        weights[ci][cj] += w;
      }
    }
  }
  for (int c = 0; c < n_comm; ++c)
    for (const auto& [d, w] : weights[c]) next.adjacency[c].emplace_back(d, w);
  return next;
}

}  // namespace

namespace {

std::vector<int> louvain_once(const IndexedGraph& ig, std::uint64_t seed) {
  const int n = ig.size();
  LevelGraph lg;
  lg.adjacency.resize(n);
  lg.self_loop.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j : ig.undirected[i]) lg.adjacency[i].emplace_back(j, 1.0);
  lg.total_weight_2m = 2.0 * static_cast<double>(ig.undirected_edge_count);

  std::vector<int> node_comm(n);
  std::iota(node_comm.begin(), node_comm.end(), 0);

  std::uint64_t level_seed = seed;
  while (true) {
    std::vector<int> level_comm;
    const bool moved = louvain_level(lg, level_seed, level_comm);
    const int n_comm =
        level_comm.empty() ? 0 : *std::max_element(level_comm.begin(), level_comm.end()) + 1;
    for (int i = 0; i < n; ++i) node_comm[i] = level_comm[node_comm[i]];
    if (!moved || n_comm == static_cast<int>(lg.adjacency.size())) break;
    lg = aggregate(lg, level_comm, n_comm);
    ++level_seed;
  }
  return node_comm;
}

}  // namespace

CommunityPartition louvain_communities(const KnowledgeGraph& g, std::uint64_t seed) {
  if (g.node_count() == 0) throw EmptyGraphError();
  IndexedGraph ig(g);
  const int n = ig.size();

  // The local-move pass is order sensitive, so run a handful of restarts with
  // derived seeds and keep the best-modularity partition (first wins ties).
  constexpr int kRestarts = 10;
  CommunityPartition part;
  part.modularity = -2.0;
  for (int r = 0; r < kRestarts; ++r) {
    const auto node_comm = louvain_once(ig, seed + 1000003ULL * static_cast<std::uint64_t>(r));
    CommunityPartition cand;
    // Renumber by sorted-label first appearance for a stable external view.
    std::map<int, int> renumber;
    for (int i = 0; i < n; ++i) {
      auto [it, inserted] = renumber.emplace(node_comm[i], static_cast<int>(renumber.size()));
      cand.assignment.emplace(ig.labels[i], it->second);
    }
    cand.modularity = modularity(g, cand.assignment);
    if (cand.modularity > part.modularity + 1e-12) part = std::move(cand);
  }
  return part;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double jaccard_edges(const std::set<Edge>& a, const std::set<Edge>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& e : a) inter += b.count(e);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

RankCorrelation spearman(const std::map<std::string, double>& xs,
                         const std::map<std::string, double>& ys) {
  std::vector<double> xv, yv;
  for (const auto& [key, x] : xs) {
    auto it = ys.find(key);
    if (it == ys.end()) continue;
    xv.push_back(x);
    yv.push_back(it->second);
  }
  const std::size_t n = xv.size();
  if (n < 2) throw InsufficientOverlapError();
  const std::vector<double> rx = average_ranks(xv);
  const std::vector<double> ry = average_ranks(yv);
  double mx = kernels::sum(rx) / n;
  double my = kernels::sum(ry) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  RankCorrelation out;
  out.n_shared = n;
  if (sxx == 0.0 && syy == 0.0) {
    // Both rankings fully tied: identical rank vectors.
    out.rho = 1.0;
  } else if (sxx == 0.0 || syy == 0.0) {
    out.rho = 0.0;
  } else {
    out.rho = sxy / std::sqrt(sxx * syy);
  }
  return out;
}

}  // namespace kgstress
