#include "netpsy/ggm.hpp"

#include <cmath>

#include "netpsy/errors.hpp"
#include "netpsy/numeric.hpp"

namespace netpsy {

namespace {

constexpr double kSpdRelativeFloor = 1e-10;

// PSD check used for psi/theta blocks: smallest eigenvalue may not fall
// below -tol relative to the scale of the matrix.
void require_psd(const Eigen::MatrixXd& m, const std::string& what) {
  require_symmetric(m, what);
  if (m.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -kSpdRelativeFloor * scale)
    fail(Errc::not_positive_definite, what + " must be positive semidefinite");
}

}  // namespace

void GgmNetwork::validate() const {
  require_symmetric(omega, "omega");
  require_zero_diagonal(omega, "omega");
  if (delta.size() != omega.rows())
    fail(Errc::dimension_mismatch, "delta length must match omega");
  if (delta.size() > 0 && delta.minCoeff() <= 0.0)
    fail(Errc::invalid_argument, "delta entries must be strictly positive");
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    for (Eigen::Index j = 0; j < omega.cols(); ++j)
      if (i != j && std::abs(omega(i, j)) >= 1.0)
        fail(Errc::invalid_argument, "partial correlations must lie in (-1, 1)");
}

void FactorModel::validate() const {
  const Eigen::Index p = lambda.rows();
  const Eigen::Index m = lambda.cols();
  if (psi.rows() != m || psi.cols() != m)
    fail(Errc::dimension_mismatch, "psi must be M x M");
  if (theta.rows() != p || theta.cols() != p)
    fail(Errc::dimension_mismatch, "theta must be P x P");
  require_psd(psi, "psi");
  require_psd(theta, "theta");
  if (b) {
    if (b->rows() != m || b->cols() != m)
      fail(Errc::dimension_mismatch, "b must be M x M");
    if (b->diagonal().cwiseAbs().maxCoeff() != 0.0)
      fail(Errc::invalid_argument, "b must have a zero diagonal");
  }
}

GgmNetwork ggm_from_precision(const Eigen::MatrixXd& precision) {
  require_symmetric(precision, "precision");
  const Eigen::Index p = precision.rows();
  if (p < 1) fail(Errc::invalid_argument, "precision must be at least 1 x 1");
  if (precision.diagonal().minCoeff() <= 0.0)
    fail(Errc::not_positive_definite, "precision diagonal must be positive");

  GgmNetwork net;
  net.delta = precision.diagonal().array().pow(-0.5);
  net.omega = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (i != j)
        net.omega(i, j) = -precision(i, j) * net.delta(i) * net.delta(j);
  // Exact symmetry despite floating point: the two products can round
  // differently, so mirror the upper triangle.
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j)
      net.omega(j, i) = net.omega(i, j);
  return net;
}

GgmNetwork partial_corr_network(const Eigen::MatrixXd& cov, double ridge) {
  require_symmetric(cov, "covariance");
  if (ridge < 0.0) fail(Errc::invalid_argument, "ridge must be nonnegative");
  Eigen::MatrixXd s = cov;
  if (ridge > 0.0)
    s += ridge * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double largest = ev.maxCoeff();
  if (largest <= 0.0 || ev.minCoeff() <= kSpdRelativeFloor * largest)
    fail(Errc::not_positive_definite,
         "covariance is not positive definite (relative eigenvalue floor 1e-10)");

  // Invert through the eigendecomposition already at hand.
  Eigen::MatrixXd precision =
      es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  precision = 0.5 * (precision + precision.transpose());
  return ggm_from_precision(precision);
}

Eigen::MatrixXd reconstruct_cov(const GgmNetwork& net) {
  net.validate();
  const Eigen::Index p = net.omega.rows();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p) - net.omega;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible())
    fail(Errc::singular_i_minus_omega, "I - omega is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  Eigen::MatrixXd sigma =
      net.delta.asDiagonal() * inv * net.delta.asDiagonal();
  return 0.5 * (sigma + sigma.transpose());
}

Eigen::MatrixXd cfa_implied_cov(const FactorModel& model) {
  model.validate();
  if (model.b)
    fail(Errc::invalid_argument,
         "model has structural coefficients; use sem_implied_cov");
  Eigen::MatrixXd sigma =
      model.lambda * model.psi * model.lambda.transpose() + model.theta;
  return 0.5 * (sigma + sigma.transpose());
}

Eigen::MatrixXd sem_implied_cov(const FactorModel& model) {
  model.validate();
  if (!model.b)
    fail(Errc::invalid_argument, "model has no structural coefficients");
  const Eigen::Index m = model.b->rows();
  const Eigen::MatrixXd imb = Eigen::MatrixXd::Identity(m, m) - *model.b;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(imb);
  if (!lu.isInvertible())
    fail(Errc::singular_i_minus_b, "I - b is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  Eigen::MatrixXd sigma =
      model.lambda * inv * model.psi * inv.transpose() * model.lambda.transpose() +
      model.theta;
  return 0.5 * (sigma + sigma.transpose());
}

SaturationReport saturation_check(const GgmNetwork& net, double tol) {
  net.validate();
  SaturationReport report;
  report.saturated = true;
  for (Eigen::Index i = 0; i < net.omega.rows(); ++i)
    for (Eigen::Index j = i + 1; j < net.omega.cols(); ++j)
      if (std::abs(net.omega(i, j)) <= tol) {
        report.saturated = false;
        ++report.near_zero_count;
      }
  return report;
}

}  // namespace netpsy
