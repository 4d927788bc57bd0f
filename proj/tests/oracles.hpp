#ifndef NETPSY_TESTS_ORACLES_HPP
#define NETPSY_TESTS_ORACLES_HPP

// Brute-force reference implementations used to cross-check the library.
// Each oracle recomputes a result from first principles along a different
// algorithmic route than the library (direct summation instead of
// log-space, point-walking instead of run scanning, Floyd-Warshall
// instead of BFS, matrix traversal instead of adjacency lists) so that
// agreement is evidence, not tautology. Quantities that must match the
// library exactly are accumulated in integers and divided with the same
// final expressions.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "netpsy/ising.hpp"

namespace netpsy::oracle {

// Direct-summation Ising pmf: explicit state vectors, plain exp, divide
// by the summed weights.
Eigen::VectorXd ising_pmf(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                          Coding coding);

struct RqaOracle {
  double rr = 0.0;
  double det = 0.0;
  double l_mean = 0.0;
  double lam = 0.0;
  long n_points = 0;
  long n_lines = 0;
};

// Point-membership RQA: for every recurrence point, walk outward along its
// diagonal / column to decide whether it lies on a qualifying line.
RqaOracle rqa(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& r,
              int l_min, int v_min, int theiler_window);

struct RnOracle {
  int n_nodes = 0;
  long n_edges = 0;
  int degree_min = 0;
  int degree_max = 0;
  double degree_mean = 0.0;
  std::vector<double> local_clustering;
  double global_clustering = 0.0;
  double transitivity = 0.0;
  double avg_path_length = 0.0;
  double assortativity = 0.0;
  int n_components = 0;
  int largest_component = 0;
};

// Definition-level graph metrics straight off the adjacency matrix:
// triangle triple-loops, BFS-free Floyd-Warshall distances, component
// labeling by repeated sweeps.
RnOracle rn(const Eigen::MatrixXi& a);

// Partial correlations through Eigen's generic inverse (the library goes
// through an eigendecomposition).
Eigen::MatrixXd partial_corr(const Eigen::MatrixXd& cov);

}  // namespace netpsy::oracle

#endif
