#include "netpsy/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "netpsy/errors.hpp"

namespace netpsy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRrTol = 1e-3;
constexpr int kBisectionBudget = 60;

double distance(const Eigen::MatrixXd& series, int a, int b, Norm norm) {
  const Eigen::RowVectorXd diff = series.row(a) - series.row(b);
  switch (norm) {
    case Norm::Euclidean: return diff.norm();
    case Norm::Maximum: return diff.cwiseAbs().maxCoeff();
    case Norm::Manhattan: return diff.cwiseAbs().sum();
  }
  return 0.0;
}

void check_series(const Eigen::MatrixXd& series) {
  if (series.rows() < 2)
    fail(Errc::insufficient_observations, "series must have at least 2 rows");
  if (series.cols() < 1)
    fail(Errc::invalid_argument, "series must have at least 1 column");
  if (!series.allFinite())
    fail(Errc::missing_values, "series contains missing or non-finite cells");
}

}  // namespace

const char* norm_name(Norm norm) {
  switch (norm) {
    case Norm::Euclidean: return "euclidean";
    case Norm::Maximum: return "maximum";
    case Norm::Manhattan: return "manhattan";
  }
  return "euclidean";
}

Norm norm_from_name(const std::string& name) {
  if (name == "euclidean") return Norm::Euclidean;
  if (name == "maximum") return Norm::Maximum;
  if (name == "manhattan") return Norm::Manhattan;
  fail(Errc::invalid_argument, "unknown norm '" + name + "'");
}

RecurrenceMatrix recurrence_matrix(const Eigen::MatrixXd& series, double epsilon,
                                   Norm norm) {
  check_series(series);
  if (!(epsilon > 0.0))
    fail(Errc::invalid_argument, "epsilon must be positive");
  const int t = static_cast<int>(series.rows());
  RecurrenceMatrix rm;
  rm.epsilon = epsilon;
  rm.norm = norm;
  rm.r.setZero(t, t);
  for (int a = 0; a < t; ++a) {
    rm.r(a, a) = 1;
    for (int b = a + 1; b < t; ++b) {
      const std::uint8_t rec = distance(series, a, b, norm) <= epsilon ? 1 : 0;
      rm.r(a, b) = rec;
      rm.r(b, a) = rec;
    }
  }
  return rm;
}

Eigen::MatrixXd embed(const Eigen::VectorXd& series, int dim, int delay) {
  if (dim < 1 || delay < 1)
    fail(Errc::invalid_argument, "embedding dimension and delay must be positive");
  const int t = static_cast<int>(series.size());
  const int rows = t - (dim - 1) * delay;
  if (rows < 2)
    fail(Errc::insufficient_observations,
         "series too short for the requested embedding");
  Eigen::MatrixXd out(rows, dim);
  for (int r = 0; r < rows; ++r)
    for (int d = 0; d < dim; ++d) out(r, d) = series(r + d * delay);
  return out;
}

double choose_epsilon(const Eigen::MatrixXd& series, double target_rr, Norm norm) {
  check_series(series);
  if (target_rr <= 0.0 || target_rr >= 1.0)
    fail(Errc::invalid_argument, "target recurrence rate must lie in (0, 1)");

  const int t = static_cast<int>(series.rows());
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(t) * (t - 1) / 2);
  for (int a = 0; a < t; ++a)
    for (int b = a + 1; b < t; ++b) dists.push_back(distance(series, a, b, norm));
  std::sort(dists.begin(), dists.end());
  const double total = static_cast<double>(dists.size());

  // Off-diagonal recurrence rate at a given radius; counting unordered
  // pairs once matches the symmetric count over t != t'.
  auto rr_at = [&](double eps) {
    const auto it = std::upper_bound(dists.begin(), dists.end(), eps);
    return static_cast<double>(it - dists.begin()) / total;
  };

  double lo = 0.0;
  double hi = dists.back();
  double eps = hi;
  for (int iter = 0; iter < kBisectionBudget; ++iter) {
    eps = 0.5 * (lo + hi);
    const double rr = rr_at(eps);
    if (std::abs(rr - target_rr) < kRrTol) break;
    if (rr < target_rr)
      lo = eps;
    else
      hi = eps;
  }
  if (!(eps > 0.0) || std::abs(rr_at(eps) - target_rr) >= kRrTol)
    fail(Errc::unachievable,
         "bisection cannot reach the target recurrence rate; the distance "
         "distribution is too coarse or degenerate");
  return eps;
}

RqaSummary rqa(const RecurrenceMatrix& rm, const RqaOptions& opts) {
  if (opts.l_min < 1 || opts.v_min < 1 || opts.theiler_window < 1)
    fail(Errc::invalid_argument, "l_min, v_min and theiler_window must be >= 1");
  const int t = rm.t();
  if (t < 2) fail(Errc::invalid_argument, "recurrence matrix must be at least 2 x 2");

  RqaSummary s;
  s.l_min = opts.l_min;
  s.v_min = opts.v_min;

  long total = 0;  // recurrence points outside the Theiler window
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b)
      if (std::abs(a - b) >= opts.theiler_window && rm.r(a, b)) ++total;
  s.n_recurrence_points = total;
  s.rr = static_cast<double>(total) /
         static_cast<double>(static_cast<long>(t) * (t - 1));

  // Diagonal lines: maximal runs inside each diagonal offset k. The upper
  // and lower triangles mirror each other, so scanning k > 0 and doubling
  // covers both.
  long diag_points = 0;
  long diag_lines = 0;
  long diag_length_sum = 0;
  for (int k = opts.theiler_window; k <= t - 1; ++k) {
    int run = 0;
    for (int a = 0; a <= t - k; ++a) {
      const bool on = a < t - k && rm.r(a, a + k) != 0;
      if (on) {
        ++run;
      } else if (run > 0) {
        if (run >= opts.l_min) {
          diag_points += run;
          ++diag_lines;
          diag_length_sum += run;
        }
        run = 0;
      }
    }
  }
  diag_points *= 2;
  diag_lines *= 2;
  diag_length_sum *= 2;
  s.n_diagonal_lines = diag_lines;
  s.det = total > 0 ? static_cast<double>(diag_points) / static_cast<double>(total)
                    : kNaN;
  s.l_mean = diag_lines > 0
                 ? static_cast<double>(diag_length_sum) / static_cast<double>(diag_lines)
                 : kNaN;

  // Vertical lines: maximal runs in the full columns, so a run may pass
  // through the main diagonal. Run lengths are measured on the full
  // column, but only points outside the Theiler window are counted, which
  // keeps LAM <= 1 against the same denominator as DET.
  long vert_points = 0;
  for (int b = 0; b < t; ++b) {
    int run = 0;
    for (int a = 0; a <= t; ++a) {
      const bool on = a < t && rm.r(a, b) != 0;
      if (on) {
        ++run;
      } else if (run > 0) {
        if (run >= opts.v_min) {
          for (int row = a - run; row < a; ++row)
            if (std::abs(row - b) >= opts.theiler_window) ++vert_points;
        }
        run = 0;
      }
    }
  }
  s.lam = total > 0 ? static_cast<double>(vert_points) / static_cast<double>(total)
                    : kNaN;
  return s;
}

Graph recurrence_network(const RecurrenceMatrix& rm) {
  const int t = rm.t();
  Eigen::MatrixXi a(t, t);
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < t; ++j)
      a(i, j) = i == j ? 0 : static_cast<int>(rm.r(i, j));
  return graph_from_adjacency(a);
}

}  // namespace netpsy
