#ifndef NETPSY_NUMERIC_HPP
#define NETPSY_NUMERIC_HPP

#include <Eigen/Dense>
#include <string>

#include "netpsy/errors.hpp"

namespace netpsy {

inline constexpr double kSymmetryTol = 1e-12;

inline bool is_symmetric(const Eigen::MatrixXd& m, double tol = kSymmetryTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

inline void require_symmetric(const Eigen::MatrixXd& m, const std::string& what,
                              double tol = kSymmetryTol) {
  if (m.rows() != m.cols())
    fail(Errc::dimension_mismatch, what + " must be square");
  if (!is_symmetric(m, tol))
    fail(Errc::invalid_argument, what + " must be symmetric within tolerance");
}

inline void require_zero_diagonal(const Eigen::MatrixXd& m, const std::string& what) {
  if (m.diagonal().cwiseAbs().maxCoeff() != 0.0)
    fail(Errc::invalid_argument, what + " must have an exactly zero diagonal");
}

// Total variation distance between two pmfs over the same support:
// half the L1 distance.
inline double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size())
    fail(Errc::dimension_mismatch, "pmfs differ in support size");
  return 0.5 * (p - q).cwiseAbs().sum();
}

// log(sum(exp(v))) with max shift.
inline double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// Column means of a matrix sample.
inline Eigen::VectorXd column_means(const Eigen::MatrixXd& x) {
  return x.colwise().mean();
}

// Sample covariance with denominator n - 1.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  if (n < 2)
    fail(Errc::insufficient_observations, "covariance needs at least 2 rows");
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

// Largest absolute eigenvalue of a (possibly nonsymmetric) real matrix.
inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace netpsy

#endif
