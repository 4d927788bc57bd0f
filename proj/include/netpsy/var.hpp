#ifndef NETPSY_VAR_HPP
#define NETPSY_VAR_HPP

#include <Eigen/Dense>
#include <vector>

#include "netpsy/dataset.hpp"
#include "netpsy/ggm.hpp"
#include "netpsy/rng.hpp"

namespace netpsy {

// Lag-1 vector autoregression x_t = nu + B (x_{t-1}) + e_t with residual
// covariance theta. stable reports whether the spectral radius of B is
// below 1; it is informational, not enforced by the fit.
struct VarModel {
  Eigen::MatrixXd b;          // P x P temporal coefficients, b(i, j): x_i,t on x_j,t-1
  Eigen::MatrixXd theta;      // P x P residual covariance
  Eigen::VectorXd intercept;  // P
  bool stable = false;

  int p() const { return static_cast<int>(intercept.size()); }
};

// Graphical VAR: the temporal model plus the contemporaneous partial
// correlation network of the residual covariance.
struct GvarModel {
  VarModel var;
  GgmNetwork contemporaneous;
};

// Pairs (x_{t-1}, x_t) extracted from a series; rows are aligned.
struct LagPairs {
  Eigen::MatrixXd prev;
  Eigen::MatrixXd cur;

  int n() const { return static_cast<int>(cur.rows()); }
};

struct VarOptions {
  // Rule-of-thumb floor on observations: require at least min_t_factor * P
  // lag pairs. The hard identifiability floor P + 2 always applies.
  int min_t_factor = 3;
};

struct GvarOptions {
  VarOptions var;
  // Opt-in ridge added to the residual covariance before inversion.
  double ridge = 0.0;
  // Fixes B = 0: the model degenerates to the Gaussian graphical model of
  // the series itself, with theta the plain sample covariance.
  bool force_b_zero = false;
};

// Consecutive rows of a series as lag pairs.
LagPairs build_lag_pairs(const Eigen::MatrixXd& series);

// Lag pairs of a person's rows. With night_break, pairs spanning a day
// boundary are excluded; rows within a day are treated as consecutive.
LagPairs build_lag_pairs(const PersonSeries& person, bool night_break);

// Per-equation OLS of x_t on an intercept and x_{t-1}. theta is the
// residual cross-product matrix divided by n_pairs - P.
VarModel fit_var(const LagPairs& pairs, const VarOptions& opts = {});
VarModel fit_var(const Eigen::MatrixXd& series, const VarOptions& opts = {});

// The same estimator through the joint conditional-Gaussian normal
// equations, solved once for all equations. Used to cross-check that the
// two writings of the model agree.
VarModel fit_var_joint(const LagPairs& pairs, const VarOptions& opts = {});

GvarModel fit_gvar(const LagPairs& pairs, const GvarOptions& opts = {});
GvarModel fit_gvar(const Eigen::MatrixXd& series, const GvarOptions& opts = {});

// Simulates t rows of the stationary process
// x_t = mu + B (x_{t-1} - mu) + e_t, e_t ~ N(0, theta), after discarding
// a burn-in of 500 steps. mu here is the process mean implied by the
// intercept: mu = (I - B)^(-1) nu. Deterministic given the rng.
Eigen::MatrixXd simulate_gvar(const VarModel& model, int t, Rng& rng,
                              int burn_in = 500);

// Mean absolute off-diagonal entry. Self-loops are excluded; for temporal
// matrices report the diagonal separately via diagonal_density.
double network_density(const Eigen::MatrixXd& m);
double diagonal_density(const Eigen::MatrixXd& m);

}  // namespace netpsy

#endif
