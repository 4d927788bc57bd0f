#ifndef NETPSY_TESTS_UTIL_HPP
#define NETPSY_TESTS_UTIL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <string>
#include <utility>

#include "netpsy/errors.hpp"
#include "netpsy/ising.hpp"
#include "netpsy/rng.hpp"

namespace netpsy::test {

// Fresh empty scratch directory; wiped first so reruns start clean.
inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("netpsy_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// True iff fn throws an Error carrying exactly the expected code.
template <typename Fn>
inline bool fails_with(Errc code, Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const Error& e) {
    return e.code() == code;
  } catch (...) {
    return false;
  }
  return false;
}

// Well-conditioned random SPD matrix (eigenvalues bounded away from 0).
inline Eigen::MatrixXd random_spd(int p, Rng& rng) {
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m * m.transpose() / p + 0.5 * Eigen::MatrixXd::Identity(p, p);
}

inline IsingParams random_ising(int p, Coding coding, Rng& rng,
                                double scale = 0.5) {
  IsingParams params;
  params.coding = coding;
  params.mu.resize(p);
  for (int i = 0; i < p; ++i) params.mu(i) = rng.uniform(-scale, scale);
  params.sigma = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const double v = rng.uniform(-scale, scale);
      params.sigma(i, j) = v;
      params.sigma(j, i) = v;
    }
  return params;
}

// Equal up to tolerance, treating NaN == NaN. tol 0 demands exact equality.
inline bool same_value(double a, double b, double tol = 0.0) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol;
}

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace netpsy::test

#endif
