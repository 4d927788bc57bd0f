#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "netpsy/errors.hpp"
#include "netpsy/recurrence.hpp"
#include "netpsy/rng.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace netpsy;
using netpsy::test::fails_with;
using netpsy::test::same_value;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd sine_series(int t, double period) {
  Eigen::MatrixXd s(t, 1);
  for (int i = 0; i < t; ++i) s(i, 0) = std::sin(2.0 * kPi * i / period);
  return s;
}

Eigen::MatrixXd noise_series(int t, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd s(t, 1);
  for (int i = 0; i < t; ++i) s(i, 0) = rng.normal();
  return s;
}

RecurrenceMatrix all_ones(int t) {
  RecurrenceMatrix rm;
  rm.r.setOnes(t, t);
  rm.epsilon = 1.0;
  return rm;
}

}  // namespace

TEST_CASE("recurrence: matrix construction and norms") {
  Eigen::MatrixXd series(2, 2);
  series << 0.0, 0.0, 3.0, 4.0;

  CHECK(recurrence_matrix(series, 4.9, Norm::Euclidean).r(0, 1) == 0);
  CHECK(recurrence_matrix(series, 5.0, Norm::Euclidean).r(0, 1) == 1);
  CHECK(recurrence_matrix(series, 4.0, Norm::Maximum).r(0, 1) == 1);
  CHECK(recurrence_matrix(series, 3.9, Norm::Maximum).r(0, 1) == 0);
  CHECK(recurrence_matrix(series, 7.0, Norm::Manhattan).r(0, 1) == 1);
  CHECK(recurrence_matrix(series, 6.9, Norm::Manhattan).r(0, 1) == 0);

  SUBCASE("symmetric with a unit diagonal") {
    Rng rng(50);
    Eigen::MatrixXd x(12, 3);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    const RecurrenceMatrix rm = recurrence_matrix(x, 1.5);
    for (int a = 0; a < rm.t(); ++a) {
      CHECK(rm.r(a, a) == 1);
      for (int b = 0; b < rm.t(); ++b) CHECK(rm.r(a, b) == rm.r(b, a));
    }
  }

  SUBCASE("validation") {
    CHECK(fails_with(Errc::invalid_argument,
                     [&] { recurrence_matrix(series, 0.0); }));
    CHECK(fails_with(Errc::insufficient_observations,
                     [&] { recurrence_matrix(Eigen::MatrixXd::Zero(1, 1), 1.0); }));
    Eigen::MatrixXd gap = series;
    gap(1, 0) = std::nan("");
    CHECK(fails_with(Errc::missing_values, [&] { recurrence_matrix(gap, 1.0); }));
  }

  SUBCASE("norm names") {
    CHECK(norm_from_name("euclidean") == Norm::Euclidean);
    CHECK(norm_from_name(norm_name(Norm::Manhattan)) == Norm::Manhattan);
    CHECK(norm_from_name(norm_name(Norm::Maximum)) == Norm::Maximum);
    CHECK(fails_with(Errc::invalid_argument, [&] { norm_from_name("L2"); }));
  }
}

TEST_CASE("recurrence: time-delay embedding") {
  Eigen::VectorXd series(6);
  series << 1, 2, 3, 4, 5, 6;
  const Eigen::MatrixXd e = embed(series, 3, 2);
  REQUIRE(e.rows() == 2);
  REQUIRE(e.cols() == 3);
  CHECK(e(0, 0) == 1);
  CHECK(e(0, 1) == 3);
  CHECK(e(0, 2) == 5);
  CHECK(e(1, 0) == 2);
  CHECK(e(1, 1) == 4);
  CHECK(e(1, 2) == 6);

  // dim = 1 reproduces the series as a column.
  CHECK((embed(series, 1, 1) - series).cwiseAbs().maxCoeff() == 0.0);

  CHECK(fails_with(Errc::invalid_argument, [&] { embed(series, 0, 1); }));
  CHECK(fails_with(Errc::invalid_argument, [&] { embed(series, 2, 0); }));
  CHECK(fails_with(Errc::insufficient_observations,
                   [&] { embed(series, 4, 2); }));
}

TEST_CASE("recurrence: epsilon calibration") {
  const Eigen::MatrixXd noise = noise_series(300, 51);

  const double eps = choose_epsilon(noise, 0.1);
  const RqaSummary s = rqa(recurrence_matrix(noise, eps));
  CHECK(std::abs(s.rr - 0.1) < 1e-3);

  SUBCASE("monotone in the target") {
    const double lo = choose_epsilon(noise, 0.05);
    const double mid = choose_epsilon(noise, 0.2);
    const double hi = choose_epsilon(noise, 0.5);
    CHECK(lo < mid);
    CHECK(mid < hi);
  }

  SUBCASE("degenerate distances are unachievable") {
    CHECK(fails_with(Errc::unachievable, [&] {
      choose_epsilon(Eigen::MatrixXd::Zero(10, 1), 0.1);
    }));
  }

  CHECK(fails_with(Errc::invalid_argument, [&] { choose_epsilon(noise, 0.0); }));
  CHECK(fails_with(Errc::invalid_argument, [&] { choose_epsilon(noise, 1.0); }));
}

TEST_CASE("recurrence: rqa on hand-checked matrices") {
  SUBCASE("fully recurrent") {
    // Diagonals k=1..5 carry runs 5,4,3,2,1; runs >= 2 hold 14 points and
    // 4 lines per triangle. Vertical runs span the full columns.
    const RqaSummary s = rqa(all_ones(6));
    CHECK(s.rr == 1.0);
    CHECK(s.n_recurrence_points == 30);
    CHECK(s.det == 28.0 / 30.0);
    CHECK(s.n_diagonal_lines == 8);
    CHECK(s.l_mean == 3.5);
    CHECK(s.lam == 1.0);
  }

  SUBCASE("fully recurrent, wider Theiler window") {
    RqaOptions opts;
    opts.theiler_window = 2;
    const RqaSummary s = rqa(all_ones(6), opts);
    CHECK(s.n_recurrence_points == 20);
    CHECK(s.det == 18.0 / 20.0);
    CHECK(s.n_diagonal_lines == 6);
    CHECK(s.l_mean == 3.0);
    // Vertical runs still span the full column; only counted points move.
    CHECK(s.lam == 1.0);
  }

  SUBCASE("checkerboard") {
    // Points on even diagonal offsets only: all diagonal, nothing vertical.
    RecurrenceMatrix rm;
    rm.r.setZero(6, 6);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) rm.r(a, b) = (a + b) % 2 == 0 ? 1 : 0;
    const RqaSummary s = rqa(rm);
    CHECK(s.rr == 0.4);
    CHECK(s.n_recurrence_points == 12);
    CHECK(s.det == 1.0);
    CHECK(s.l_mean == 3.0);
    CHECK(s.n_diagonal_lines == 4);
    CHECK(s.lam == 0.0);
  }

  SUBCASE("identity matrix has no off-diagonal recurrences") {
    RecurrenceMatrix rm;
    rm.r.setZero(4, 4);
    for (int a = 0; a < 4; ++a) rm.r(a, a) = 1;
    const RqaSummary s = rqa(rm);
    CHECK(s.rr == 0.0);
    CHECK(s.n_recurrence_points == 0);
    CHECK(std::isnan(s.det));
    CHECK(std::isnan(s.l_mean));
    CHECK(std::isnan(s.lam));
    CHECK(s.n_diagonal_lines == 0);
  }

  SUBCASE("validation") {
    RqaOptions bad;
    bad.l_min = 0;
    CHECK(fails_with(Errc::invalid_argument, [&] { rqa(all_ones(4), bad); }));
    bad = RqaOptions{};
    bad.theiler_window = 0;
    CHECK(fails_with(Errc::invalid_argument, [&] { rqa(all_ones(4), bad); }));
    CHECK(fails_with(Errc::invalid_argument, [&] { rqa(all_ones(1)); }));
  }
}

TEST_CASE("recurrence: rqa agrees exactly with the point-walking oracle") {
  Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const int t = 20;
    const double density = rng.uniform(0.05, 0.95);
    RecurrenceMatrix rm;
    rm.r.setZero(t, t);
    for (int a = 0; a < t; ++a) {
      rm.r(a, a) = 1;
      for (int b = a + 1; b < t; ++b) {
        const std::uint8_t rec = rng.bernoulli(density) ? 1 : 0;
        rm.r(a, b) = rec;
        rm.r(b, a) = rec;
      }
    }
    RqaOptions opts;
    opts.l_min = 2 + rng.uniform_int(2);
    opts.v_min = 2 + rng.uniform_int(2);
    opts.theiler_window = 1 + rng.uniform_int(3);

    const RqaSummary lib = rqa(rm, opts);
    const oracle::RqaOracle ref =
        oracle::rqa(rm.r, opts.l_min, opts.v_min, opts.theiler_window);

    REQUIRE(lib.n_recurrence_points == ref.n_points);
    REQUIRE(lib.n_diagonal_lines == ref.n_lines);
    REQUIRE(same_value(lib.rr, ref.rr, 0.0));
    REQUIRE(same_value(lib.det, ref.det, 0.0));
    REQUIRE(same_value(lib.l_mean, ref.l_mean, 0.0));
    REQUIRE(same_value(lib.lam, ref.lam, 0.0));
  }
}

TEST_CASE("recurrence: deterministic signals separate from noise") {
  // A non-integer period keeps the pairwise distances essentially distinct,
  // so the recurrence rate is finely tunable.  The scalar series is delay
  // embedded first: without embedding, points at mirrored phase recur too,
  // and those recurrences run against the main diagonal instead of along it,
  // which caps DET well below 1 even for a noise-free signal.
  const Eigen::MatrixXd sine = embed(sine_series(300, 25.3), 2, 6);
  const double eps_sine = choose_epsilon(sine, 0.1);
  const RqaSummary s_sine = rqa(recurrence_matrix(sine, eps_sine));
  CHECK(std::abs(s_sine.rr - 0.1) < 1e-3);
  CHECK(s_sine.det > 0.9);

  const Eigen::MatrixXd noise = embed(noise_series(300, 53), 2, 6);
  const double eps_noise = choose_epsilon(noise, 0.1);
  const RqaSummary s_noise = rqa(recurrence_matrix(noise, eps_noise));
  CHECK(s_noise.det < 0.4);
  CHECK(s_sine.det > s_noise.det);
}

TEST_CASE("recurrence: network view of the recurrence matrix") {
  SUBCASE("full recurrence gives the complete graph") {
    const Graph g = recurrence_network(all_ones(4));
    const RnSummary s = rn_metrics(g);
    CHECK(s.n_edges == 6);
    CHECK(s.avg_path_length == 1.0);
    CHECK(s.global_clustering == 1.0);
  }

  SUBCASE("no off-diagonal recurrences give an edgeless graph") {
    RecurrenceMatrix rm;
    rm.r.setZero(5, 5);
    for (int a = 0; a < 5; ++a) rm.r(a, a) = 1;
    const Graph g = recurrence_network(rm);
    CHECK(g.edge_count() == 0);
    CHECK(connected_components(g).size() == 5);
  }

  SUBCASE("adjacency is the thresholded distance relation minus self-loops") {
    const Eigen::MatrixXd sine = sine_series(60, 11.7);
    const double eps = choose_epsilon(sine, 0.2);
    const RecurrenceMatrix rm = recurrence_matrix(sine, eps);
    const Graph g = recurrence_network(rm);
    for (int a = 0; a < 60; ++a)
      for (int b = 0; b < 60; ++b) {
        const bool close = std::abs(sine(a, 0) - sine(b, 0)) <= eps;
        if (a == b)
          CHECK(!g.has_edge(a, b));
        else
          CHECK(g.has_edge(a, b) == close);
      }
  }
}
