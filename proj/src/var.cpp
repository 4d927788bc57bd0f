#include "netpsy/var.hpp"

#include <cmath>

#include "netpsy/errors.hpp"
#include "netpsy/numeric.hpp"

namespace netpsy {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite())
    fail(Errc::missing_values, std::string(what) + " contains non-finite cells");
}

void check_pair_count(const LagPairs& pairs, const VarOptions& opts) {
  const int p = static_cast<int>(pairs.cur.cols());
  const int n = pairs.n();
  const int floor = std::max(p + 2, opts.min_t_factor * p);
  if (n < floor)
    fail(Errc::insufficient_observations,
         std::to_string(n) + " lag pairs for P = " + std::to_string(p) +
             " variables; need at least " + std::to_string(floor));
}

Eigen::MatrixXd design_matrix(const LagPairs& pairs) {
  Eigen::MatrixXd z(pairs.n(), pairs.prev.cols() + 1);
  z.col(0).setOnes();
  z.rightCols(pairs.prev.cols()) = pairs.prev;
  return z;
}

}  // namespace

LagPairs build_lag_pairs(const Eigen::MatrixXd& series) {
  if (series.rows() < 2)
    fail(Errc::insufficient_observations, "series must have at least 2 rows");
  require_finite(series, "series");
  LagPairs pairs;
  pairs.prev = series.topRows(series.rows() - 1);
  pairs.cur = series.bottomRows(series.rows() - 1);
  return pairs;
}

LagPairs build_lag_pairs(const PersonSeries& person, bool night_break) {
  require_finite(person.values, "series");
  std::vector<int> rows;
  for (int r = 1; r < person.t(); ++r)
    if (!night_break || person.day[r] == person.day[r - 1]) rows.push_back(r);
  if (rows.empty())
    fail(Errc::insufficient_observations,
         "person '" + person.id + "' has no usable lag pairs");
  LagPairs pairs;
  pairs.prev.resize(static_cast<Eigen::Index>(rows.size()), person.values.cols());
  pairs.cur.resize(static_cast<Eigen::Index>(rows.size()), person.values.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    pairs.prev.row(static_cast<Eigen::Index>(k)) = person.values.row(rows[k] - 1);
    pairs.cur.row(static_cast<Eigen::Index>(k)) = person.values.row(rows[k]);
  }
  return pairs;
}

VarModel fit_var(const LagPairs& pairs, const VarOptions& opts) {
  require_finite(pairs.prev, "lagged predictors");
  require_finite(pairs.cur, "responses");
  if (pairs.prev.rows() != pairs.cur.rows() || pairs.prev.cols() != pairs.cur.cols())
    fail(Errc::dimension_mismatch, "lag pair matrices must be aligned");
  check_pair_count(pairs, opts);

  const int p = static_cast<int>(pairs.cur.cols());
  const int n = pairs.n();
  const Eigen::MatrixXd z = design_matrix(pairs);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
  if (qr.rank() < z.cols())
    fail(Errc::collinear_predictors,
         "lagged design matrix is rank deficient (rank " +
             std::to_string(qr.rank()) + " of " + std::to_string(z.cols()) + ")");

  VarModel model;
  model.b.resize(p, p);
  model.intercept.resize(p);
  Eigen::MatrixXd residuals(n, p);
  for (int eq = 0; eq < p; ++eq) {
    const Eigen::VectorXd beta = qr.solve(pairs.cur.col(eq));
    model.intercept(eq) = beta(0);
    model.b.row(eq) = beta.tail(p).transpose();
    residuals.col(eq) = pairs.cur.col(eq) - z * beta;
  }
  model.theta = residuals.transpose() * residuals / static_cast<double>(n - p);
  model.theta = 0.5 * (model.theta + model.theta.transpose());
  model.stable = spectral_radius(model.b) < 1.0;
  return model;
}

VarModel fit_var(const Eigen::MatrixXd& series, const VarOptions& opts) {
  return fit_var(build_lag_pairs(series), opts);
}

VarModel fit_var_joint(const LagPairs& pairs, const VarOptions& opts) {
  require_finite(pairs.prev, "lagged predictors");
  require_finite(pairs.cur, "responses");
  check_pair_count(pairs, opts);

  const int p = static_cast<int>(pairs.cur.cols());
  const int n = pairs.n();
  const Eigen::MatrixXd z = design_matrix(pairs);
  const Eigen::MatrixXd gram = z.transpose() * z;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible())
    fail(Errc::collinear_predictors, "normal equations are singular");

  // One multivariate solve: coefficients for every equation at once.
  const Eigen::MatrixXd coef = lu.solve(z.transpose() * pairs.cur);
  VarModel model;
  model.intercept = coef.row(0).transpose();
  model.b = coef.bottomRows(p).transpose();
  const Eigen::MatrixXd residuals = pairs.cur - z * coef;
  model.theta = residuals.transpose() * residuals / static_cast<double>(n - p);
  model.theta = 0.5 * (model.theta + model.theta.transpose());
  model.stable = spectral_radius(model.b) < 1.0;
  return model;
}

GvarModel fit_gvar(const LagPairs& pairs, const GvarOptions& opts) {
  GvarModel model;
  if (opts.force_b_zero) {
    // With B fixed to zero the residuals are the centered observations, so
    // theta is the plain sample covariance of the current rows and the
    // contemporaneous network is exactly the GGM of the series.
    require_finite(pairs.cur, "responses");
    const int p = static_cast<int>(pairs.cur.cols());
    model.var.b = Eigen::MatrixXd::Zero(p, p);
    model.var.intercept = column_means(pairs.cur);
    model.var.theta = sample_covariance(pairs.cur);
    model.var.stable = true;
  } else {
    model.var = fit_var(pairs, opts.var);
  }
  model.contemporaneous = partial_corr_network(model.var.theta, opts.ridge);
  return model;
}

GvarModel fit_gvar(const Eigen::MatrixXd& series, const GvarOptions& opts) {
  if (opts.force_b_zero) {
    // The degenerate model conditions on nothing; use every row.
    require_finite(series, "series");
    const int p = static_cast<int>(series.cols());
    GvarModel model;
    model.var.b = Eigen::MatrixXd::Zero(p, p);
    model.var.intercept = column_means(series);
    model.var.theta = sample_covariance(series);
    model.var.stable = true;
    model.contemporaneous = partial_corr_network(model.var.theta, opts.ridge);
    return model;
  }
  return fit_gvar(build_lag_pairs(series), opts);
}

Eigen::MatrixXd simulate_gvar(const VarModel& model, int t, Rng& rng, int burn_in) {
  const int p = model.p();
  if (p < 1) fail(Errc::invalid_argument, "model has no variables");
  if (model.b.rows() != p || model.b.cols() != p || model.theta.rows() != p ||
      model.theta.cols() != p)
    fail(Errc::dimension_mismatch, "model matrices must be P x P");
  if (t < 1) fail(Errc::invalid_argument, "t must be positive");
  if (burn_in < 0) fail(Errc::invalid_argument, "burn_in must be nonnegative");
  require_symmetric(model.theta, "theta", 1e-9);
  if (spectral_radius(model.b) >= 1.0)
    fail(Errc::unstable_model, "spectral radius of b is not below 1");

  Eigen::LLT<Eigen::MatrixXd> llt(model.theta);
  if (llt.info() != Eigen::Success)
    fail(Errc::not_positive_definite, "theta is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  // Process mean implied by the intercept.
  const Eigen::VectorXd mean =
      (Eigen::MatrixXd::Identity(p, p) - model.b).lu().solve(model.intercept);

  Eigen::VectorXd x = mean;
  Eigen::VectorXd noise(p);
  Eigen::MatrixXd out(t, p);
  for (int step = 0; step < burn_in + t; ++step) {
    for (int i = 0; i < p; ++i) noise(i) = rng.normal();
    x = mean + model.b * (x - mean) + chol * noise;
    if (step >= burn_in) out.row(step - burn_in) = x.transpose();
  }
  return out;
}

double network_density(const Eigen::MatrixXd& m) {
  const Eigen::Index p = m.rows();
  if (m.cols() != p) fail(Errc::dimension_mismatch, "matrix must be square");
  if (p < 2) fail(Errc::invalid_argument, "density needs at least 2 nodes");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (i != j) sum += std::abs(m(i, j));
  return sum / static_cast<double>(p * (p - 1));
}

double diagonal_density(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    fail(Errc::invalid_argument, "matrix must be square and nonempty");
  return m.diagonal().cwiseAbs().mean();
}

}  // namespace netpsy
