#ifndef NETPSY_RECURRENCE_HPP
#define NETPSY_RECURRENCE_HPP

#include <Eigen/Dense>

#include "netpsy/graph.hpp"

namespace netpsy {

enum class Norm { Euclidean, Maximum, Manhattan };

const char* norm_name(Norm norm);
Norm norm_from_name(const std::string& name);

// Binary recurrence matrix R(t, t') = 1 iff ||x_t - x_t'|| <= epsilon.
// Symmetric with a unit diagonal by construction.
struct RecurrenceMatrix {
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> r;
  double epsilon = 0.0;
  Norm norm = Norm::Euclidean;

  int t() const { return static_cast<int>(r.rows()); }
};

struct RqaOptions {
  int l_min = 2;  // minimum diagonal line length
  int v_min = 2;  // minimum vertical line length
  // Diagonals |k| < theiler_window are excluded from the recurrence-rate
  // and diagonal-line statistics; the default excludes only the main
  // diagonal.
  int theiler_window = 1;
};

// Recurrence quantification summary. Undefined quantities (no recurrence
// points, no qualifying lines) are quiet NaN.
struct RqaSummary {
  double rr = 0.0;      // recurrence rate, main diagonal excluded
  double det = 0.0;     // fraction of recurrence points on diagonal lines >= l_min
  double l_mean = 0.0;  // mean length of those diagonal lines
  double lam = 0.0;     // fraction of recurrence points on vertical lines >= v_min
  long n_recurrence_points = 0;  // off-diagonal points
  long n_diagonal_lines = 0;     // lines of length >= l_min, both triangles
  int l_min = 2;
  int v_min = 2;
};

// Rows of `series` are states (multivariate rows allowed; a univariate
// series is a single column). No delay embedding is applied; use embed()
// first to study a scalar series in a reconstructed state space.
RecurrenceMatrix recurrence_matrix(const Eigen::MatrixXd& series, double epsilon,
                                   Norm norm = Norm::Euclidean);

// Time-delay embedding of a scalar series: row t of the result is
// (x_t, x_{t+delay}, ..., x_{t+(dim-1) delay}).
Eigen::MatrixXd embed(const Eigen::VectorXd& series, int dim, int delay);

// Bisection on epsilon over [0, max pairwise distance] until the
// off-diagonal recurrence rate is within 1e-3 of target_rr or 60 iterations
// have run. Throws Unachievable when the tolerance cannot be met (for
// example a degenerate distance distribution such as a constant series).
double choose_epsilon(const Eigen::MatrixXd& series, double target_rr,
                      Norm norm = Norm::Euclidean);

// Line-scan RQA. Diagonal lines are maximal runs inside each off-main
// diagonal; vertical lines are maximal runs in the full columns, with the
// trivial self-point excluded from all point counts.
RqaSummary rqa(const RecurrenceMatrix& rm, const RqaOptions& opts = {});

// Recurrence network: adjacency R - I, an undirected simple graph.
Graph recurrence_network(const RecurrenceMatrix& rm);

}  // namespace netpsy

#endif
