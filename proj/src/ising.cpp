#include "netpsy/ising.hpp"

#include <cmath>
#include <cstdint>

#include "netpsy/errors.hpp"
#include "netpsy/numeric.hpp"

namespace netpsy {

namespace {

constexpr int kMaxEnumerationVars = 20;
constexpr double kEigenvalueRetentionRel = 1e-10;
constexpr double kAutoShiftPad = 1e-9;
constexpr double kSeparationBetaBound = 20.0;
constexpr double kSeparationFallbackRidge = 1.0;

double logistic(double z) {
  // Evaluated in the stable branch for either sign of z.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd config_states(std::uint32_t config, int p, Coding coding) {
  Eigen::VectorXd s(p);
  for (int i = 0; i < p; ++i) {
    const int bit = static_cast<int>((config >> i) & 1u);
    s(i) = coding == Coding::ZeroOne ? bit : 2 * bit - 1;
  }
  return s;
}

}  // namespace

const char* coding_name(Coding coding) {
  return coding == Coding::ZeroOne ? "zero-one" : "plus-minus";
}

Coding coding_from_name(const std::string& name) {
  if (name == "zero-one") return Coding::ZeroOne;
  if (name == "plus-minus") return Coding::PlusMinus;
  fail(Errc::invalid_argument, "unknown coding '" + name + "'");
}

void IsingParams::validate() const {
  if (mu.size() < 1) fail(Errc::invalid_argument, "mu must have length >= 1");
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size())
    fail(Errc::dimension_mismatch, "sigma must be P x P");
  require_symmetric(sigma, "sigma");
  require_zero_diagonal(sigma, "sigma");
  if (!mu.allFinite() || !sigma.allFinite())
    fail(Errc::invalid_argument, "parameters must be finite");
}

Pmf ising_pmf_from_fields(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                          Coding coding) {
  const int p = static_cast<int>(mu.size());
  if (p < 1) fail(Errc::invalid_argument, "mu must have length >= 1");
  if (sigma.rows() != p || sigma.cols() != p)
    fail(Errc::dimension_mismatch, "sigma must be P x P");
  require_symmetric(sigma, "sigma");
  if (p > kMaxEnumerationVars)
    fail(Errc::too_many_variables, "exact enumeration is limited to P <= 20");

  const std::uint32_t n_config = 1u << p;
  Eigen::VectorXd log_w(n_config);
  for (std::uint32_t k = 0; k < n_config; ++k) {
    const Eigen::VectorXd s = config_states(k, p, coding);
    log_w(k) = s.dot(mu) + 0.5 * s.dot(sigma * s);
  }
  const double lz = log_sum_exp(log_w);

  Pmf pmf;
  pmf.coding = coding;
  pmf.p = p;
  pmf.probs = (log_w.array() - lz).exp();
  pmf.probs /= pmf.probs.sum();
  return pmf;
}

Pmf ising_pmf_exact(const IsingParams& params) {
  params.validate();
  return ising_pmf_from_fields(params.mu, params.sigma, params.coding);
}

IsingParams ising_recode(const IsingParams& params, Coding target) {
  params.validate();
  if (params.coding == target) return params;

  const int p = params.p();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
  IsingParams out;
  out.coding = target;
  if (target == Coding::ZeroOne) {
    // s = 2y - 1: couplings scale by 4, thresholds pick up the row sums.
    out.sigma = 4.0 * params.sigma;
    out.mu = 2.0 * params.mu - 2.0 * (params.sigma * ones);
  } else {
    // y = (s + 1)/2, the inverse map.
    out.sigma = 0.25 * params.sigma;
    out.mu = 0.5 * params.mu + 0.25 * (params.sigma * ones);
  }
  return out;
}

Eigen::MatrixXi ising_gibbs(const IsingParams& params, int n, int burn_in, Rng& rng) {
  params.validate();
  if (n < 1) fail(Errc::invalid_argument, "n must be positive");
  if (burn_in < 0) fail(Errc::invalid_argument, "burn_in must be nonnegative");

  const int p = params.p();
  const bool zero_one = params.coding == Coding::ZeroOne;
  const int lo = zero_one ? 0 : -1;

  Eigen::VectorXd x(p);
  for (int i = 0; i < p; ++i) x(i) = rng.bernoulli(0.5) ? 1 : lo;

  Eigen::MatrixXi samples(n, p);
  for (int sweep = 0; sweep < burn_in + n; ++sweep) {
    for (int i = 0; i < p; ++i) {
      // Local field; the zero diagonal makes the self term vanish.
      const double h = params.mu(i) + params.sigma.row(i).dot(x);
      const double p_high = zero_one ? logistic(h) : logistic(2.0 * h);
      x(i) = rng.bernoulli(p_high) ? 1 : lo;
    }
    if (sweep >= burn_in)
      for (int i = 0; i < p; ++i)
        samples(sweep - burn_in, i) = static_cast<int>(x(i));
  }
  return samples;
}

namespace {

struct LogisticFit {
  Eigen::VectorXd beta;  // intercept first, then slopes
  bool separated = false;
};

// Newton-Raphson on the ridge-penalized logistic log-likelihood. The
// intercept is never penalized. Perfect separation is flagged and triggers
// a refit by the caller with a fallback ridge. It shows up either as a
// diverging or non-finite step, or as "convergence": once the saturated
// probabilities are within the gradient tolerance of the labels the
// gradient vanishes with the coefficients far outside any plausible range,
// so the bound is also checked on the converged solution.
LogisticFit logistic_regression(const Eigen::MatrixXd& design,
                                const Eigen::VectorXd& y, double ridge) {
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  Eigen::VectorXd penalty_diag = Eigen::VectorXd::Constant(k, 2.0 * ridge);
  penalty_diag(0) = 0.0;

  LogisticFit fit;
  fit.beta = Eigen::VectorXd::Zero(k);
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd eta = design * fit.beta;
    Eigen::VectorXd prob(n);
    for (Eigen::Index r = 0; r < n; ++r) prob(r) = logistic(eta(r));
    Eigen::VectorXd grad =
        design.transpose() * (y - prob) - penalty_diag.cwiseProduct(fit.beta);
    if (grad.cwiseAbs().maxCoeff() < 1e-10) {
      fit.separated = fit.beta.cwiseAbs().maxCoeff() > kSeparationBetaBound;
      return fit;
    }

    Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
    Eigen::MatrixXd hess = design.transpose() * w.asDiagonal() * design;
    hess.diagonal() += penalty_diag;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) {
      fit.separated = true;
      return fit;
    }
    fit.beta += step;
    if (fit.beta.cwiseAbs().maxCoeff() > kSeparationBetaBound) {
      fit.separated = true;
      return fit;
    }
  }
  fit.separated = true;  // no convergence within the iteration budget
  return fit;
}

}  // namespace

IsingFit ising_fit_pl(const Eigen::MatrixXi& data, Coding coding, double penalty) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (p < 1) fail(Errc::invalid_argument, "data must have at least one column");
  if (n < 2) fail(Errc::insufficient_observations, "need at least 2 rows");
  if (penalty < 0.0) fail(Errc::invalid_argument, "penalty must be nonnegative");

  const int lo = coding == Coding::ZeroOne ? 0 : -1;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < p; ++c)
      if (data(r, c) != lo && data(r, c) != 1)
        fail(Errc::invalid_argument, "data cells must be valid states of the coding");

  // In {0,1} coding the conditional of node i is logistic(mu_i + sum sigma_ij x_j);
  // in {-1,+1} coding the same expression appears doubled, so the regression
  // coefficients are twice the Ising parameters.
  const double scale = coding == Coding::ZeroOne ? 1.0 : 0.5;

  IsingFit result;
  result.params.coding = coding;
  result.params.mu = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd slopes = Eigen::MatrixXd::Zero(p, p);

  Eigen::MatrixXd design(n, p);  // column 0 intercept, then the other nodes
  Eigen::VectorXd y(n);
  for (Eigen::Index node = 0; node < p; ++node) {
    design.col(0).setOnes();
    Eigen::Index col = 1;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j == node) continue;
      design.col(col++) = data.col(j).cast<double>();
    }
    for (Eigen::Index r = 0; r < n; ++r) y(r) = data(r, node) == 1 ? 1.0 : 0.0;

    LogisticFit fit = logistic_regression(design, y, penalty);
    if (fit.separated) {
      result.separation_detected = true;
      result.warnings.push_back("separation detected in regression for node " +
                                std::to_string(node) + "; refit with ridge " +
                                std::to_string(kSeparationFallbackRidge));
      fit = logistic_regression(design, y,
                                std::max(penalty, kSeparationFallbackRidge));
    }

    result.params.mu(node) = scale * fit.beta(0);
    col = 1;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j == node) continue;
      slopes(node, j) = scale * fit.beta(col++);
    }
  }

  result.params.sigma = 0.5 * (slopes + slopes.transpose());
  result.params.sigma.diagonal().setZero();
  return result;
}

MirtParams ising_to_mirt(const IsingParams& params, double c) {
  params.validate();
  const IsingParams zo = ising_recode(params, Coding::ZeroOne);
  const int p = zo.p();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_sigma(zo.sigma,
                                                          Eigen::EigenvaluesOnly);
  if (c < 0.0)
    c = std::max(0.0, -es_sigma.eigenvalues().minCoeff()) + kAutoShiftPad;

  Eigen::MatrixXd shifted = zo.sigma + c * Eigen::MatrixXd::Identity(p, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shifted);
  const Eigen::VectorXd ev = es.eigenvalues();  // ascending
  const double largest = ev.maxCoeff();
  const double scale = std::max(1.0, std::abs(largest));
  if (ev.minCoeff() < -1e-8 * scale)
    fail(Errc::not_psd_after_shift,
         "sigma + c I has a negative eigenvalue; increase c");

  const double floor = kEigenvalueRetentionRel * std::max(largest, 0.0);
  std::vector<int> kept;
  for (int r = p - 1; r >= 0; --r)  // descending eigenvalue order
    if (ev(r) > floor && ev(r) > 0.0) kept.push_back(r);

  MirtParams mirt;
  mirt.shift_c = c;
  mirt.intercepts = zo.mu.array() - c / 2.0;
  mirt.eigenvalues.resize(static_cast<Eigen::Index>(kept.size()));
  mirt.loadings.resize(p, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    mirt.eigenvalues(static_cast<Eigen::Index>(r)) = ev(kept[r]);
    Eigen::VectorXd q = es.eigenvectors().col(kept[r]);
    // Sign convention: first component of largest magnitude is positive.
    Eigen::Index imax;
    q.cwiseAbs().maxCoeff(&imax);
    if (q(imax) < 0.0) q = -q;
    mirt.loadings.col(static_cast<Eigen::Index>(r)) = std::sqrt(ev(kept[r])) * q;
  }
  return mirt;
}

void gauss_hermite_normal(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) fail(Errc::invalid_argument, "quadrature order must be positive");
  // Jacobi matrix of the (monic, probabilists') Hermite polynomials:
  // zero diagonal, off-diagonal sqrt(k). Eigenvalues are the nodes, squared
  // first eigenvector components the weights (Golub-Welsch).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd subdiag(std::max(0, n - 1));
  for (int k = 1; k < n; ++k) subdiag(k - 1) = std::sqrt(static_cast<double>(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, subdiag);
  nodes = es.eigenvalues();
  weights = es.eigenvectors().row(0).transpose().array().square();
}

Pmf mirt_marginal_pmf(const MirtParams& mirt, int p, int quad_points) {
  if (p < 1 || mirt.intercepts.size() != p)
    fail(Errc::dimension_mismatch, "intercepts must have length P");
  if (p > kMaxEnumerationVars)
    fail(Errc::too_many_variables, "exact enumeration is limited to P <= 20");
  const int r_dims = static_cast<int>(mirt.loadings.cols());
  if (r_dims > 0 && mirt.loadings.rows() != p)
    fail(Errc::dimension_mismatch, "loadings must be P x R");
  if (r_dims > 4)
    fail(Errc::too_many_factors, "tensor quadrature is limited to R <= 4");
  if (quad_points < 20)
    fail(Errc::invalid_argument, "quad_points must be at least 20");

  Eigen::VectorXd nodes, weights;
  if (r_dims > 0) gauss_hermite_normal(quad_points, nodes, weights);

  // Tensor-product Gauss-Hermite over R independent standard normals.
  // The integrand exp((A'x)' theta) separates across dimensions, so the
  // full tensor sum over quad_points^R nodes factors exactly into a
  // product of one-dimensional quadratures; this evaluates that product.
  const std::uint32_t n_config = 1u << p;
  Eigen::VectorXd log_w(n_config);
  for (std::uint32_t k = 0; k < n_config; ++k) {
    double lw = 0.0;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(r_dims);
    for (int i = 0; i < p; ++i) {
      if ((k >> i) & 1u) {
        lw += mirt.intercepts(i);
        if (r_dims > 0) t += mirt.loadings.row(i).transpose();
      }
    }
    for (int r = 0; r < r_dims; ++r) {
      const Eigen::ArrayXd expo = t(r) * nodes.array();
      const double m = expo.maxCoeff();
      lw += m + std::log((weights.array() * (expo - m).exp()).sum());
    }
    log_w(k) = lw;
  }

  const double lz = log_sum_exp(log_w);
  Pmf pmf;
  pmf.coding = Coding::ZeroOne;
  pmf.p = p;
  pmf.probs = (log_w.array() - lz).exp();
  pmf.probs /= pmf.probs.sum();
  return pmf;
}

}  // namespace netpsy
