#include "netpsy/idiographic.hpp"

#include <cmath>
#include <cstdint>

#include "netpsy/errors.hpp"
#include "netpsy/graph.hpp"
#include "netpsy/numeric.hpp"

namespace netpsy {

namespace {

constexpr int kMaxEnumerationNodes = 4;

void require_mu(const LatentTopology& topology, const Eigen::VectorXd& mu) {
  if (mu.size() != topology.p)
    fail(Errc::dimension_mismatch, "mu must have one threshold per node");
  if (!mu.allFinite()) fail(Errc::invalid_argument, "mu must be finite");
}

// Edges of the complete graph in lexicographic order (i < j); the bit
// positions of a graph mask follow this order.
std::vector<std::pair<int, int>> edge_list(int p) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) edges.emplace_back(i, j);
  return edges;
}

RealizedGraph graph_from_mask(std::uint32_t mask,
                              const std::vector<std::pair<int, int>>& edges, int p) {
  RealizedGraph w = RealizedGraph::Zero(p, p);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if ((mask >> e) & 1u) {
      w(edges[e].first, edges[e].second) = 1;
      w(edges[e].second, edges[e].first) = 1;
    }
  return w;
}

}  // namespace

void LatentTopology::validate() const {
  if (p < 1) fail(Errc::invalid_argument, "topology needs at least one node");
  if (edge_prob.rows() != p || edge_prob.cols() != p)
    fail(Errc::dimension_mismatch, "edge_prob must be P x P");
  require_symmetric(edge_prob, "edge_prob");
  require_zero_diagonal(edge_prob, "edge_prob");
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (edge_prob(i, j) < 0.0 || edge_prob(i, j) >= 1.0)
        fail(Errc::domain_error, "edge probabilities must lie in [0, 1)");
}

RealizedGraph sample_er(const LatentTopology& topology, Rng& rng) {
  topology.validate();
  RealizedGraph w = RealizedGraph::Zero(topology.p, topology.p);
  for (int i = 0; i < topology.p; ++i)
    for (int j = i + 1; j < topology.p; ++j)
      if (rng.bernoulli(topology.edge_prob(i, j))) {
        w(i, j) = 1;
        w(j, i) = 1;
      }
  return w;
}

std::vector<std::vector<int>> clusters(const RealizedGraph& w) {
  return connected_components(graph_from_adjacency(w));
}

double cluster_weight(const Eigen::VectorXd& mu, const std::vector<int>& cluster) {
  double s = 0.0;
  for (int v : cluster) {
    if (v < 0 || v >= mu.size())
      fail(Errc::invalid_argument, "cluster member out of range");
    s += mu(v);
  }
  return 2.0 * std::cosh(s);
}

Eigen::VectorXi color(const RealizedGraph& w, const Eigen::VectorXd& mu, Rng& rng) {
  const auto comps = clusters(w);
  if (mu.size() != w.rows())
    fail(Errc::dimension_mismatch, "mu must have one threshold per node");
  Eigen::VectorXi x(w.rows());
  for (const auto& comp : comps) {
    double s = 0.0;
    for (int v : comp) s += mu(v);
    // P(+1) = e^s / (e^s + e^-s), evaluated in the stable branch.
    const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * s));
    const int state = rng.bernoulli(p_plus) ? 1 : -1;
    for (int v : comp) x(v) = state;
  }
  return x;
}

Eigen::MatrixXd theta_to_sigma(const Eigen::MatrixXd& theta) {
  require_symmetric(theta, "theta");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
  for (Eigen::Index i = 0; i < theta.rows(); ++i)
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
      if (i == j) continue;
      if (theta(i, j) < 0.0 || theta(i, j) >= 1.0)
        fail(Errc::domain_error, "theta entries must lie in [0, 1)");
      sigma(i, j) = -0.5 * std::log1p(-theta(i, j));
    }
  return sigma;
}

Eigen::MatrixXd sigma_to_theta(const Eigen::MatrixXd& sigma) {
  require_symmetric(sigma, "sigma");
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
  for (Eigen::Index i = 0; i < sigma.rows(); ++i)
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      if (i == j) continue;
      if (sigma(i, j) < 0.0)
        fail(Errc::domain_error,
             "couplings must be nonnegative (ferromagnetic restriction)");
      theta(i, j) = -std::expm1(-2.0 * sigma(i, j));
    }
  return theta;
}

Pmf marginal_pmf_exact(const LatentTopology& topology, const Eigen::VectorXd& mu,
                       GraphWeighting weighting) {
  topology.validate();
  require_mu(topology, mu);
  const int p = topology.p;
  if (p > kMaxEnumerationNodes)
    fail(Errc::too_many_variables, "graph enumeration is limited to P <= 4");

  const auto edges = edge_list(p);
  const std::uint32_t n_graphs = 1u << edges.size();
  const std::uint32_t n_config = 1u << p;

  Eigen::VectorXd probs = Eigen::VectorXd::Zero(n_config);
  double total_weight = 0.0;
  for (std::uint32_t mask = 0; mask < n_graphs; ++mask) {
    // Erdos-Renyi factor of this graph.
    double er = 1.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double theta = topology.edge_prob(edges[e].first, edges[e].second);
      er *= ((mask >> e) & 1u) ? theta : 1.0 - theta;
    }
    if (er == 0.0) continue;

    const RealizedGraph w = graph_from_mask(mask, edges, p);
    const auto comps = clusters(w);

    double weight = er;
    if (weighting == GraphWeighting::RandomCluster)
      for (const auto& comp : comps) weight *= cluster_weight(mu, comp);
    total_weight += weight;

    // Coloring distribution: clusters are independent, nodes of a cluster
    // share their state, so only cluster-constant configurations carry mass.
    std::vector<double> s_c, p_plus;
    for (const auto& comp : comps) {
      double s = 0.0;
      for (int v : comp) s += mu(v);
      s_c.push_back(s);
      p_plus.push_back(1.0 / (1.0 + std::exp(-2.0 * s)));
    }
    for (std::uint32_t k = 0; k < n_config; ++k) {
      double cond = 1.0;
      for (std::size_t c = 0; c < comps.size() && cond > 0.0; ++c) {
        const int first_state = static_cast<int>((k >> comps[c][0]) & 1u);
        for (int v : comps[c])
          if (static_cast<int>((k >> v) & 1u) != first_state) {
            cond = 0.0;
            break;
          }
        if (cond > 0.0) cond *= first_state == 1 ? p_plus[c] : 1.0 - p_plus[c];
      }
      probs(k) += weight * cond;
    }
  }

  Pmf pmf;
  pmf.coding = Coding::PlusMinus;
  pmf.p = p;
  pmf.probs = probs / total_weight;
  pmf.probs /= pmf.probs.sum();
  return pmf;
}

Pmf sample_marginal(const LatentTopology& topology, const Eigen::VectorXd& mu,
                    GraphWeighting weighting, int n, Rng& rng) {
  topology.validate();
  require_mu(topology, mu);
  if (n < 1) fail(Errc::invalid_argument, "n must be positive");
  const int p = topology.p;
  const std::uint32_t n_config = 1u << p;

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n_config);
  double total = 0.0;
  for (int draw = 0; draw < n; ++draw) {
    const RealizedGraph w = sample_er(topology, rng);
    double weight = 1.0;
    if (weighting == GraphWeighting::RandomCluster)
      for (const auto& comp : clusters(w)) weight *= cluster_weight(mu, comp);
    const Eigen::VectorXi x = color(w, mu, rng);
    std::uint32_t k = 0;
    for (int i = 0; i < p; ++i)
      if (x(i) == 1) k |= 1u << i;
    mass(k) += weight;
    total += weight;
  }

  Pmf pmf;
  pmf.coding = Coding::PlusMinus;
  pmf.p = p;
  pmf.probs = mass / total;
  return pmf;
}

}  // namespace netpsy
