#ifndef NETPSY_MLVAR_HPP
#define NETPSY_MLVAR_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "netpsy/dataset.hpp"
#include "netpsy/ggm.hpp"
#include "netpsy/var.hpp"

namespace netpsy {

struct MlVarOptions {
  VarOptions var;
  bool night_break = true;
};

// Two-step multilevel VAR. Step 1 centers each person's series on its own
// means and fits a per-person gVAR; step 2 aggregates: fixed-effect
// temporal coefficients are elementwise means, the fixed-effect
// contemporaneous network standardizes the averaged residual precisions,
// and the between-person network is the partial correlation network of
// the covariance of the person means.
struct MlVarResult {
  struct PersonFit {
    std::string id;
    Eigen::VectorXd mean;  // per-item mean before centering
    GvarModel model;
  };

  std::vector<PersonFit> persons;  // persons whose fit succeeded
  Eigen::MatrixXd fixed_b;
  GgmNetwork fixed_contemporaneous;
  GgmNetwork between;
  std::vector<std::pair<std::string, std::string>> failed;  // (person, reason)
  std::vector<std::string> warnings;
};

// Requires at least 2 persons with usable series; per-person failures are
// collected in `failed` and excluded from the aggregates rather than
// aborting the fit. Errors in the between-person step are surfaced with
// context.
MlVarResult fit_mlvar(const IldDataset& data, const MlVarOptions& opts = {});

}  // namespace netpsy

#endif
