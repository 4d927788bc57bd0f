#ifndef NETPSY_ISING_HPP
#define NETPSY_ISING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "netpsy/rng.hpp"

namespace netpsy {

// State coding of the binary variables. PlusMinus uses {-1, +1},
// ZeroOne uses {0, 1}. Every pmf and sample matrix is tagged with the
// coding it lives in.
enum class Coding { PlusMinus, ZeroOne };

const char* coding_name(Coding coding);
Coding coding_from_name(const std::string& name);

// Ising model p(x) proportional to exp(x' mu + x' sigma x / 2).
// sigma is symmetric with an exactly zero diagonal; the pairwise term
// x' sigma x / 2 therefore counts every coupling once.
struct IsingParams {
  Eigen::VectorXd mu;     // P thresholds
  Eigen::MatrixXd sigma;  // P x P couplings, symmetric, zero diagonal
  Coding coding = Coding::PlusMinus;

  int p() const { return static_cast<int>(mu.size()); }

  void validate() const;
};

// Probability mass function over all 2^P configurations in a fixed coding.
// Configuration k encodes item i as bit i of k: bit 0 is the low state of
// the coding (-1 or 0), bit 1 the high state (+1 or 1). The same index
// therefore refers to corresponding configurations across codings.
struct Pmf {
  Eigen::VectorXd probs;  // length 2^P, sums to 1
  Coding coding = Coding::PlusMinus;
  int p = 0;

  // Value of item `item` in configuration `config` under this coding.
  int state(std::uint32_t config, int item) const {
    const int bit = static_cast<int>((config >> item) & 1u);
    return coding == Coding::ZeroOne ? bit : 2 * bit - 1;
  }
};

// Multidimensional item response model produced by the eigendecomposition
// bridge. Intercepts live in {0,1} coding; loadings(i, r) is
// sqrt(lambda_r) q_{ir} for the retained eigenpairs of sigma + c I.
struct MirtParams {
  Eigen::VectorXd intercepts;  // P, equal to mu_i - c/2 after recoding
  Eigen::MatrixXd loadings;    // P x R
  double shift_c = 0.0;
  Eigen::VectorXd eigenvalues;  // R retained positive eigenvalues
};

struct IsingFit {
  IsingParams params;
  bool separation_detected = false;
  std::vector<std::string> warnings;
};

// Exact pmf by full enumeration of the 2^P configurations. P <= 20.
Pmf ising_pmf_exact(const IsingParams& params);

// Same enumeration for raw fields, without requiring a zero diagonal.
// Diagonal entries contribute sigma_ii x_i^2 / 2; the diagonal-shift
// identities are exercised through this entry point.
Pmf ising_pmf_from_fields(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                          Coding coding);

// Reexpresses the parameters in the other coding so that the pushforward
// of the pmf under the state map s = 2y - 1 is preserved. Returns the
// input unchanged when it is already in the target coding.
IsingParams ising_recode(const IsingParams& params, Coding target);

// Gibbs sampler with fixed sequential site order 0..P-1; one kept sample
// per full sweep after burn_in sweeps. Rows of the result are samples in
// the coding of the parameters. Deterministic given the rng state.
Eigen::MatrixXi ising_gibbs(const IsingParams& params, int n, int burn_in, Rng& rng);

// Pseudo-likelihood fit: one logistic regression per node on all other
// nodes, slope matrix symmetrized by averaging. penalty is a nonnegative
// ridge weight on the slopes; penalty 0 is plain maximum pseudo-likelihood.
// Perfect separation is reported via the separation_detected flag and the
// affected regressions fall back to a documented ridge, never an exception.
IsingFit ising_fit_pl(const Eigen::MatrixXi& data, Coding coding, double penalty = 0.0);

// Eigendecomposition bridge from an Ising model to a MIRT model.
// PlusMinus input is recoded to ZeroOne first; the diagonal shift c is
// absorbed into the intercepts (mu_i - c/2), which is only possible in
// {0,1} coding where x_i^2 = x_i. With c < 0 the shift is chosen
// automatically as max(0, -lambda_min(sigma)) + 1e-9 so that sigma + c I
// is positive semidefinite. Eigenpairs with lambda <= 1e-10 * lambda_max
// are dropped.
MirtParams ising_to_mirt(const IsingParams& params, double c = -1.0);

// Marginal pmf of the MIRT model over R standard-normal latent variables,
// computed with Gauss-Hermite tensor quadrature and normalized over the
// 2^P configurations. The per-configuration weight is
//   exp(x' delta) * Integral exp((A' x)' theta) dPhi(theta),
// the kernel form whose normalizer is the partition function itself.
// Result is in ZeroOne coding. R <= 4, quad_points >= 20.
Pmf mirt_marginal_pmf(const MirtParams& mirt, int p, int quad_points = 80);

// Nodes and weights integrating f against the standard normal density:
// Integral f(t) phi(t) dt ~= sum_i weights[i] f(nodes[i]).
// Computed by Golub-Welsch on the Hermite Jacobi matrix.
void gauss_hermite_normal(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace netpsy

#endif
