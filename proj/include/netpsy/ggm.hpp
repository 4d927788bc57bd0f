#ifndef NETPSY_GGM_HPP
#define NETPSY_GGM_HPP

#include <Eigen/Dense>
#include <optional>

namespace netpsy {

// Gaussian graphical model in its network parameterization: a symmetric
// partial correlation matrix Omega with zero diagonal, plus the positive
// scaling vector delta with delta_ii = kappa_ii^(-1/2), where K = Sigma^(-1)
// is the precision matrix. Together they carry exactly the information in
// the covariance: Sigma = Delta (I - Omega)^(-1) Delta.
struct GgmNetwork {
  Eigen::MatrixXd omega;  // P x P, symmetric, zero diagonal, |entries| < 1
  Eigen::VectorXd delta;  // P, strictly positive

  int p() const { return static_cast<int>(delta.size()); }

  void validate() const;
};

// Confirmatory factor / structural equation model in covariance form.
// lambda is the P x M loading matrix, psi the M x M latent covariance,
// theta the P x P residual covariance. b, when present, holds directed
// structural coefficients among the latents (zero diagonal).
struct FactorModel {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd psi;
  Eigen::MatrixXd theta;
  std::optional<Eigen::MatrixXd> b;

  void validate() const;
};

struct SaturationReport {
  bool saturated = false;   // every off-diagonal |omega_ij| > tol
  int near_zero_count = 0;  // unordered pairs with |omega_ij| <= tol
};

// Standardizes a precision matrix into a GgmNetwork:
// omega_ij = -kappa_ij / sqrt(kappa_ii kappa_jj), delta_ii = kappa_ii^(-1/2).
GgmNetwork ggm_from_precision(const Eigen::MatrixXd& precision);

// Inverts an SPD covariance and standardizes the precision into partial
// correlations. ridge > 0 adds ridge * I before inversion (opt-in, never
// applied silently). Throws NotPositiveDefinite when the smallest eigenvalue
// is not above 1e-10 times the largest.
GgmNetwork partial_corr_network(const Eigen::MatrixXd& cov, double ridge = 0.0);

// Reconstructs the covariance Sigma = Delta (I - Omega)^(-1) Delta.
// Throws SingularIMinusOmega when I - Omega is not invertible.
Eigen::MatrixXd reconstruct_cov(const GgmNetwork& net);

// Model-implied covariance of a CFA: Sigma = Lambda Psi Lambda^T + Theta.
Eigen::MatrixXd cfa_implied_cov(const FactorModel& model);

// Model-implied covariance of a SEM with structural matrix B among latents:
// Sigma = Lambda (I-B)^(-1) Psi (I-B)^(-T) Lambda^T + Theta.
// A path model among observed variables is the special case Lambda = I,
// Theta = 0, with the residual covariance passed in psi:
// Sigma = (I-B)^(-1) Psi (I-B)^(-T).
Eigen::MatrixXd sem_implied_cov(const FactorModel& model);

// Checks whether a network is saturated: all off-diagonal partial
// correlations exceed tol in absolute value.
SaturationReport saturation_check(const GgmNetwork& net, double tol = 0.01);

}  // namespace netpsy

#endif
