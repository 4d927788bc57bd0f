#include "netpsy/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "netpsy/errors.hpp"

namespace netpsy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

long Graph::edge_count() const {
  long total = 0;
  for (const auto& nbrs : adj) total += static_cast<long>(nbrs.size());
  return total / 2;
}

bool Graph::has_edge(int u, int v) const {
  return std::binary_search(adj[u].begin(), adj[u].end(), v);
}

Graph graph_from_adjacency(const Eigen::MatrixXi& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) fail(Errc::dimension_mismatch, "adjacency must be square");
  Graph g;
  g.n = n;
  g.adj.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != 0 && a(i, j) != 1)
        fail(Errc::invalid_argument, "adjacency entries must be 0 or 1");
      if (i == j && a(i, j) != 0)
        fail(Errc::invalid_argument, "adjacency must have a zero diagonal");
      if (a(i, j) != a(j, i))
        fail(Errc::invalid_argument, "adjacency must be symmetric");
      if (i < j && a(i, j) == 1) {
        g.adj[i].push_back(j);
        g.adj[j].push_back(i);
      }
    }
  return g;
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  UnionFind uf(g.n);
  for (int v = 0; v < g.n; ++v)
    for (int w : g.adj[v]) uf.unite(v, w);
  std::map<int, std::vector<int>> by_root;
  for (int v = 0; v < g.n; ++v) by_root[uf.find(v)].push_back(v);
  std::vector<std::vector<int>> comps;
  for (auto& [root, members] : by_root) comps.push_back(std::move(members));
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

RnSummary rn_metrics(const Graph& g) {
  if (g.n < 1) fail(Errc::invalid_argument, "graph has no nodes");
  RnSummary s;
  s.n_nodes = g.n;
  s.n_edges = g.edge_count();

  s.degree_min = g.n > 0 ? g.degree(0) : 0;
  s.degree_max = 0;
  long degree_sum = 0;
  for (int v = 0; v < g.n; ++v) {
    const int d = g.degree(v);
    s.degree_min = std::min(s.degree_min, d);
    s.degree_max = std::max(s.degree_max, d);
    degree_sum += d;
  }
  s.degree_mean = static_cast<double>(degree_sum) / g.n;

  // Local clustering: realized fraction of links among a node's neighbors.
  // Triangle and triple counts stay in integers so that identical counts
  // give bit-identical ratios across implementations.
  long triangles3 = 0;  // each triangle counted once per corner
  long triples = 0;
  s.local_clustering.resize(g.n);
  for (int v = 0; v < g.n; ++v) {
    const int d = g.degree(v);
    if (d < 2) {
      s.local_clustering[v] = 0.0;
      continue;
    }
    long links = 0;
    for (std::size_t a = 0; a < g.adj[v].size(); ++a)
      for (std::size_t b = a + 1; b < g.adj[v].size(); ++b)
        if (g.has_edge(g.adj[v][a], g.adj[v][b])) ++links;
    const long pairs = static_cast<long>(d) * (d - 1) / 2;
    s.local_clustering[v] = static_cast<double>(links) / static_cast<double>(pairs);
    triangles3 += links;  // links at corner v = triangles through v
    triples += pairs;
  }
  double local_sum = 0.0;
  for (double c : s.local_clustering) local_sum += c;
  s.global_clustering = local_sum / g.n;
  s.transitivity =
      triples > 0 ? static_cast<double>(triangles3) / static_cast<double>(triples)
                  : kNaN;

  // Components and mean shortest path over the largest one (BFS).
  const auto comps = connected_components(g);
  s.n_components = static_cast<int>(comps.size());
  const auto largest = std::max_element(
      comps.begin(), comps.end(), [](const auto& a, const auto& b) {
        return a.size() < b.size() ||
               (a.size() == b.size() && a.front() > b.front());
      });
  s.largest_component = static_cast<int>(largest->size());
  if (largest->size() < 2) {
    s.avg_path_length = kNaN;
  } else {
    long dist_sum = 0;
    long pair_count = 0;
    std::vector<int> dist(g.n);
    for (int src : *largest) {
      std::fill(dist.begin(), dist.end(), -1);
      dist[src] = 0;
      std::deque<int> queue{src};
      while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : g.adj[v])
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            queue.push_back(w);
          }
      }
      for (int dst : *largest)
        if (dst > src) {
          dist_sum += dist[dst];
          ++pair_count;
        }
    }
    s.avg_path_length = static_cast<double>(dist_sum) / static_cast<double>(pair_count);
  }

  // Degree assortativity: Pearson correlation of endpoint degrees over all
  // directed edge instances, computed from integer accumulators.
  if (s.n_edges == 0) {
    s.assortativity = kNaN;
  } else {
    long long m2 = 0, sx = 0, sxx = 0, sxy = 0;
    for (int v = 0; v < g.n; ++v)
      for (int w : g.adj[v]) {
        const long long dv = g.degree(v);
        const long long dw = g.degree(w);
        ++m2;
        sx += dv;
        sxx += dv * dv;
        sxy += dv * dw;
      }
    // Symmetric edge list: x and y share moments.
    const double num = static_cast<double>(m2) * static_cast<double>(sxy) -
                       static_cast<double>(sx) * static_cast<double>(sx);
    const double den = static_cast<double>(m2) * static_cast<double>(sxx) -
                       static_cast<double>(sx) * static_cast<double>(sx);
    s.assortativity = den > 0.0 ? num / den : kNaN;
  }
  return s;
}

}  // namespace netpsy
