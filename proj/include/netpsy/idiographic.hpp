#ifndef NETPSY_IDIOGRAPHIC_HPP
#define NETPSY_IDIOGRAPHIC_HPP

#include <Eigen/Dense>
#include <vector>

#include "netpsy/ising.hpp"
#include "netpsy/rng.hpp"

namespace netpsy {

// Latent network topology: independent edge probabilities theta_ij on the
// complete graph over p nodes. theta is symmetric with zero diagonal and
// entries in [0, 1); entry (i, j) is the probability that edge {i, j} is
// realized. The ferromagnetic restriction (couplings >= 0, hence
// theta >= 0) is built into the domain.
struct LatentTopology {
  int p = 0;
  Eigen::MatrixXd edge_prob;

  void validate() const;
};

// Realized graph: symmetric 0/1 adjacency.
using RealizedGraph = Eigen::MatrixXi;

// How graphs are weighted in the encompassing mixture. ErdosRenyi uses the
// independent-edge probabilities as-is (the Divide-and-Color model);
// RandomCluster reweights each graph by the product of its cluster weights
// 2 cosh(sum of thresholds in the cluster), which makes the node marginal
// exactly the Ising model with sigma_ij = -log(1 - theta_ij) / 2.
enum class GraphWeighting { ErdosRenyi, RandomCluster };

// Independent Bernoulli draw of each edge.
RealizedGraph sample_er(const LatentTopology& topology, Rng& rng);

// Connected components of a realized graph, as sorted node lists sorted by
// smallest member.
std::vector<std::vector<int>> clusters(const RealizedGraph& w);

// Cluster weight lambda_c = 2 cosh(sum of mu_i over the cluster) >= 2.
double cluster_weight(const Eigen::VectorXd& mu, const std::vector<int>& cluster);

// Colors each cluster +1 with probability e^s / (e^s + e^-s), where s is
// the cluster's threshold sum, and -1 otherwise; all nodes of a cluster
// share the state. The result is a {-1, +1} configuration consistent with
// the cluster weights: summing exp(s x_c) over the two states gives
// 2 cosh(s).
Eigen::VectorXi color(const RealizedGraph& w, const Eigen::VectorXd& mu, Rng& rng);

// Coupling map between the edge-probability and Ising parameterizations:
// sigma_ij = -log(1 - theta_ij) / 2 and theta_ij = 1 - exp(-2 sigma_ij).
Eigen::MatrixXd theta_to_sigma(const Eigen::MatrixXd& theta);
Eigen::MatrixXd sigma_to_theta(const Eigen::MatrixXd& sigma);

// Exact node marginal p(x) = sum_w p(x | w) p(w) by enumeration of all
// 2^(p(p-1)/2) graphs. p <= 4. Result is in {-1, +1} coding.
Pmf marginal_pmf_exact(const LatentTopology& topology, const Eigen::VectorXd& mu,
                       GraphWeighting weighting);

// Self-normalized importance-sampling estimate of the marginal: graphs are
// proposed from the Erdos-Renyi factor and, under RandomCluster weighting,
// reweighted by their cluster-weight product before coloring. Converges to
// marginal_pmf_exact in total variation as n grows.
Pmf sample_marginal(const LatentTopology& topology, const Eigen::VectorXd& mu,
                    GraphWeighting weighting, int n, Rng& rng);

}  // namespace netpsy

#endif
