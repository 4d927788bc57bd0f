#ifndef NETPSY_GRAPH_HPP
#define NETPSY_GRAPH_HPP

#include <Eigen/Dense>
#include <vector>

namespace netpsy {

class UnionFind {
public:
  explicit UnionFind(int n) : parent_(n), rank_(n, 0) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

// Simple undirected graph as adjacency lists; neighbor lists are sorted.
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;

  int degree(int v) const { return static_cast<int>(adj[v].size()); }
  long edge_count() const;
  bool has_edge(int u, int v) const;
};

// Builds a graph from a symmetric 0/1 adjacency matrix with zero diagonal.
Graph graph_from_adjacency(const Eigen::MatrixXi& a);

// Node and global summary metrics of an undirected graph. Quantities that
// are undefined on the input (mean path length of an edgeless graph,
// assortativity of a regular graph, ...) are reported as quiet NaN rather
// than raising.
struct RnSummary {
  int n_nodes = 0;
  long n_edges = 0;
  int degree_min = 0;
  int degree_max = 0;
  double degree_mean = 0.0;
  std::vector<double> local_clustering;  // 0 for degree < 2
  double global_clustering = 0.0;        // mean of local over all nodes
  double transitivity = 0.0;             // 3 * triangles / connected triples
  double avg_path_length = 0.0;          // over the largest component
  double assortativity = 0.0;            // degree correlation over edges
  int n_components = 0;
  int largest_component = 0;
};

RnSummary rn_metrics(const Graph& g);

// Connected components as sorted node lists, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const Graph& g);

}  // namespace netpsy

#endif
