#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include "kgstress/graph.hpp"
#include "kgstress/metrics.hpp"

using namespace kgstress;

namespace {

KnowledgeGraph from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  KnowledgeGraph g("fix");
  for (std::size_t i = 0; i < n; ++i)
    g.add_node("n" + std::to_string(i), NodeKind::Term);
  for (auto [a, b] : edges)
    g.add_edge("n" + std::to_string(a), "n" + std::to_string(b), EdgeKind::Generic);
  return g;
}

// Undirected adjacency (self-loops dropped, reciprocal edges collapsed),
// rebuilt independently of the library's projection.
std::vector<std::vector<int>> undirected(const KnowledgeGraph& g,
                                         std::vector<std::string>& labels) {
  const auto nodes = g.node_set();
  labels.assign(nodes.begin(), nodes.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = (int)i;
  std::vector<std::set<int>> adj(labels.size());
  for (const auto& e : g.edge_set()) {
    int u = index[e.src], v = index[e.dst];
    if (u == v) continue;
    adj[u].insert(v);
    adj[v].insert(u);
  }
  std::vector<std::vector<int>> out(labels.size());
  for (std::size_t i = 0; i < adj.size(); ++i) out[i].assign(adj[i].begin(), adj[i].end());
  return out;
}

// Brute-force betweenness: enumerate all shortest paths pair by pair.
std::vector<double> brute_betweenness(const std::vector<std::vector<int>>& adj) {
  const int n = (int)adj.size();
  std::vector<double> bc(n, 0.0);
  // count shortest paths from s to t through each vertex by full DFS over
  // the BFS DAG — exponential, fine at n <= 12
  for (int s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    dist[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
    }
    for (int t = 0; t < n; ++t) {
      if (t == s || dist[t] < 0) continue;
      // enumerate all shortest s-t paths
      std::vector<std::vector<int>> paths;
      std::vector<int> cur{t};
      auto walk = [&](auto&& self, int v) -> void {
        if (v == s) {
          paths.push_back(cur);
          return;
        }
        for (int u : adj[v])
          if (dist[u] == dist[v] - 1) {
            cur.push_back(u);
            self(self, u);
            cur.pop_back();
          }
      };
      walk(walk, t);
      for (const auto& p : paths)
        for (std::size_t i = 1; i + 1 < p.size(); ++i)
          bc[p[i]] += 1.0 / paths.size();
    }
  }
  for (auto& v : bc) v /= 2.0;  // unordered pairs
  return bc;
}

// Dense PageRank oracle with uniform dangling redistribution.
std::map<std::string, double> dense_pagerank(const KnowledgeGraph& g, double d,
                                             std::size_t iters) {
  const auto nodes = g.node_set();
  std::vector<std::string> labels(nodes.begin(), nodes.end());
  const std::size_t n = labels.size();
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < n; ++i) index[labels[i]] = (int)i;
  std::vector<std::vector<int>> out(n);
  for (const auto& e : g.edge_set()) out[index[e.src]].push_back(index[e.dst]);
  std::vector<double> pr(n, 1.0 / n);
  for (std::size_t it = 0; it < iters; ++it) {
    std::vector<double> next(n, 0.0);
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (out[u].empty())
        dangling += pr[u];
      else
        for (int v : out[u]) next[v] += pr[u] / out[u].size();
    }
    for (std::size_t v = 0; v < n; ++v)
      next[v] = (1.0 - d) / n + d * (next[v] + dangling / n);
    pr = next;
  }
  const double total = std::accumulate(pr.begin(), pr.end(), 0.0);
  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < n; ++i) scores[labels[i]] = pr[i] / total;
  return scores;
}

double modularity_formula(const std::vector<std::vector<int>>& adj,
                          const std::vector<int>& comm) {
  double m2 = 0;
  for (const auto& nbrs : adj) m2 += nbrs.size();
  if (m2 == 0) return 0.0;
  std::map<int, double> internal, degree;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    degree[comm[u]] += adj[u].size();
    for (int v : adj[u])
      if (comm[u] == comm[(std::size_t)v]) internal[comm[u]] += 1.0;
  }
  double q = 0;
  for (const auto& [c, deg] : degree)
    q += internal[c] / m2 - (deg / m2) * (deg / m2);
  return q;
}

KnowledgeGraph random_graph(std::mt19937& rng, int max_nodes = 12) {
  std::uniform_int_distribution<int> nn(2, max_nodes);
  const int n = nn(rng);
  std::uniform_int_distribution<int> ne(0, n * (n - 1) / 2);
  std::vector<std::pair<int, int>> edges;
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int count = ne(rng);
  for (int i = 0; i < count; ++i) edges.emplace_back(pick(rng), pick(rng));
  return from_edges(n, edges);
}

}  // namespace

TEST_CASE("betweenness equals brute-force enumeration on 200 random graphs") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_graph(rng);
    std::vector<std::string> labels;
    const auto adj = undirected(g, labels);
    const auto oracle = brute_betweenness(adj);
    const auto got = betweenness_centrality(g);
    for (std::size_t i = 0; i < labels.size(); ++i)
      CHECK(got.scores.at(labels[i]) == doctest::Approx(oracle[i]).epsilon(1e-9));
  }
}

TEST_CASE("betweenness known values: path and star") {
  // path a-b-c-d: inner nodes each carry 2 pairs
  auto path = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(betweenness_centrality(path).scores.at("n1") == doctest::Approx(2.0));
  // star: hub lies on all 6 leaf pairs
  auto star = from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  CHECK(betweenness_centrality(star).scores.at("n0") == doctest::Approx(6.0));
  CHECK(betweenness_centrality(star).scores.at("n1") == doctest::Approx(0.0));
}

TEST_CASE("pagerank matches the dense oracle and sums to one") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_graph(rng, 10);
    const auto got = pagerank(g);
    const auto oracle = dense_pagerank(g, 0.85, 3000);
    double total = 0;
    for (const auto& [node, score] : got.scores) {
      CHECK(score == doctest::Approx(oracle.at(node)).epsilon(1e-7));
      total += score;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("degree centrality honors direction; normalization divides by n-1") {
  auto g = from_edges(3, {{0, 1}, {0, 2}});
  CHECK(degree_centrality(g).scores.at("n0") == doctest::Approx(2.0));
  CHECK(degree_centrality(g).scores.at("n1") == doctest::Approx(1.0));
  CHECK(degree_centrality(g, true).scores.at("n0") == doctest::Approx(1.0));
}

TEST_CASE("eigenvector centrality: star hub dominates, L2-normalized") {
  auto star = from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto ev = eigenvector_centrality(star);
  double norm = 0;
  for (const auto& [node, score] : ev.scores) norm += score * score;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
  // analytic: hub = 1/sqrt(2), leaves = 1/(2*sqrt(2))
  CHECK(ev.scores.at("n0") == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(ev.scores.at("n1") == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("modularity: single community is exactly zero") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng);
    std::map<std::string, int> one;
    for (const auto& node : g.node_set()) one[node] = 0;
    CHECK(modularity(g, one) == 0.0);
  }
}

TEST_CASE("modularity: two triangles plus bridge") {
  auto g = from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {2, 3}});
  std::map<std::string, int> part{{"n0", 0}, {"n1", 0}, {"n2", 0},
                                  {"n3", 1}, {"n4", 1}, {"n5", 1}};
  // Q = 2*(3/7 - (7/14)^2) = 5/14
  CHECK(modularity(g, part) == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
}

TEST_CASE("modularity matches the independent formula on random partitions") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_graph(rng);
    std::vector<std::string> labels;
    const auto adj = undirected(g, labels);
    std::map<std::string, int> part;
    std::vector<int> comm(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      comm[i] = (int)(rng() % 3);
      part[labels[i]] = comm[i];
    }
    CHECK(modularity(g, part) ==
          doctest::Approx(modularity_formula(adj, comm)).epsilon(1e-12));
  }
}

TEST_CASE("modularity rejects uncovered nodes") {
  auto g = from_edges(3, {{0, 1}});
  std::map<std::string, int> part{{"n0", 0}, {"n1", 0}};
  CHECK_THROWS_AS(modularity(g, part), UncoveredNodeError);
}

TEST_CASE("louvain reaches the exhaustive optimum on small connected graphs") {
  std::mt19937 rng(43);
  int tested = 0;
  while (tested < 40) {
    const auto g = random_graph(rng, 8);
    std::vector<std::string> labels;
    const auto adj = undirected(g, labels);
    const std::size_t n = labels.size();
    if (n < 2 || n > 8) continue;
    // connectivity check
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          q.push(v);
        }
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) continue;
    ++tested;
    // exhaustive search over set partitions via restricted growth strings
    std::vector<int> best_comm;
    double best_q = -2.0;
    std::vector<int> rgs(n, 0);
    auto recurse = [&](auto&& self, std::size_t pos, int max_used) -> void {
      if (pos == n) {
        std::map<std::string, int> part;
        for (std::size_t i = 0; i < n; ++i) part[labels[i]] = rgs[i];
        const double q = modularity(g, part);
        if (q > best_q + 1e-12) {
          best_q = q;
          best_comm = rgs;
        }
        return;
      }
      for (int c = 0; c <= max_used + 1; ++c) {
        rgs[pos] = c;
        self(self, pos + 1, std::max(max_used, c));
      }
    };
    recurse(recurse, 1, 0);  // rgs[0] = 0 fixed
    const auto part = louvain_communities(g);
    CHECK(part.modularity == doctest::Approx(best_q).epsilon(1e-9));
  }
}

TEST_CASE("louvain is deterministic for a fixed seed") {
  std::mt19937 rng(47);
  const auto g = random_graph(rng, 12);
  const auto a = louvain_communities(g, 42);
  const auto b = louvain_communities(g, 42);
  CHECK(a.assignment == b.assignment);
  CHECK(a.modularity == b.modularity);
}

TEST_CASE("louvain modularity is self-consistent") {
  std::mt19937 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_graph(rng);
    const auto part = louvain_communities(g);
    CHECK(part.modularity == doctest::Approx(modularity(g, part.assignment)));
    CHECK(part.assignment.size() == g.node_count());
  }
}

TEST_CASE("jaccard conventions") {
  CHECK(jaccard({}, {}) == 1.0);
  CHECK(jaccard({"a"}, {}) == 0.0);
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("spearman equals rank-then-pearson on random inputs") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> dist(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 20;
    std::map<std::string, double> xs, ys;
    std::vector<double> xv, yv;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string key = "k" + std::to_string(i);
      xs[key] = rng() % 4 == 0 ? 1.0 : dist(rng);  // force ties sometimes
      ys[key] = dist(rng);
      xv.push_back(xs[key]);
      yv.push_back(ys[key]);
    }
    const auto rx = average_ranks(xv);
    const auto ry = average_ranks(yv);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += rx[i];
      my += ry[i];
    }
    mx /= n;
    my /= n;
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      cov += (rx[i] - mx) * (ry[i] - my);
      vx += (rx[i] - mx) * (rx[i] - mx);
      vy += (ry[i] - my) * (ry[i] - my);
    }
    const double expected = (vx > 0 && vy > 0) ? cov / std::sqrt(vx * vy) : 0.0;
    const auto got = spearman(xs, ys);
    CHECK(got.n_shared == n);
    if (vx > 0 && vy > 0) CHECK(got.rho == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("spearman self-correlation is one, monotone transforms preserve rho") {
  std::map<std::string, double> xs{{"a", 3}, {"b", 1}, {"c", 2}, {"d", 2}};
  CHECK(spearman(xs, xs).rho == doctest::Approx(1.0));
  std::map<std::string, double> cube;
  for (const auto& [key, value] : xs) cube[key] = value * value * value;
  CHECK(spearman(xs, cube).rho == doctest::Approx(1.0));
  // constant map: self-correlation still defined as 1
  std::map<std::string, double> flat{{"a", 1}, {"b", 1}, {"c", 1}};
  CHECK(spearman(flat, flat).rho == doctest::Approx(1.0));
  CHECK_THROWS_AS(spearman({{"a", 1.0}}, {{"a", 2.0}}), InsufficientOverlapError);
}

TEST_CASE("centrality dispatch and empty-graph errors") {
  KnowledgeGraph empty("e");
  CHECK_THROWS_AS(pagerank(empty), EmptyGraphError);
  CHECK_THROWS_AS(betweenness_centrality(empty), EmptyGraphError);
  auto g = from_edges(3, {{0, 1}, {1, 2}});
  for (auto m : {CentralityMeasure::Degree, CentralityMeasure::Betweenness,
                 CentralityMeasure::PageRank, CentralityMeasure::Eigenvector})
    CHECK(centrality(g, m).scores.size() == 3);
}
