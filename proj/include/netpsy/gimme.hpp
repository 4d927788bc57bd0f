#ifndef NETPSY_GIMME_HPP
#define NETPSY_GIMME_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "netpsy/dataset.hpp"

namespace netpsy {

struct GimmeOptions {
  // A candidate path is promoted to the group level when adding it improves
  // the BIC of at least this fraction of persons.
  double group_threshold = 0.75;
  bool subgroup = false;
  // Cap on the number of selected paths per person across all stages;
  // nonpositive means the default 2 * P * P.
  int max_paths = 0;
  bool night_break = true;
};

// Unified SEM structure shared across persons. Contemporaneous edges are
// directed, contemporaneous(i, j) = 1 meaning x_i,t regresses on x_j,t;
// temporal(i, j) = 1 meaning x_i,t regresses on x_j,t-1. The
// contemporaneous structure is kept acyclic at every level, so per-node
// least squares is a valid estimator throughout.
struct GimmeResult {
  struct FitRecord {
    std::string person;
    std::string stage;  // "group", "subgroup", "individual"
    double log_lik = 0.0;
    double bic = 0.0;
    int n_paths = 0;
  };
  struct CycleRejection {
    std::string stage;
    int target = 0;
    int source = 0;
  };

  std::vector<std::string> person_ids;

  Eigen::MatrixXi group_contemporaneous;       // binary structure
  Eigen::MatrixXi group_temporal;
  Eigen::MatrixXd group_contemporaneous_coef;  // person means on group paths
  Eigen::MatrixXd group_temporal_coef;

  bool has_subgroups = false;
  std::vector<int> subgroup_of;  // per person, 0-based subgroup index
  std::vector<Eigen::MatrixXi> subgroup_contemporaneous;
  std::vector<Eigen::MatrixXi> subgroup_temporal;

  std::vector<Eigen::MatrixXi> person_contemporaneous;  // full structure per person
  std::vector<Eigen::MatrixXi> person_temporal;
  std::vector<Eigen::MatrixXd> person_contemporaneous_coef;
  std::vector<Eigen::MatrixXd> person_temporal_coef;

  std::vector<FitRecord> fit_records;
  std::vector<CycleRejection> cycle_rejected;
  std::vector<std::string> warnings;  // includes NoGroupPath

  int n_subgroups() const {
    return static_cast<int>(subgroup_contemporaneous.size());
  }
};

// Group iterative model search over unified SEMs. Forward selection adds,
// at each step, the candidate path (temporal, or contemporaneous without
// self-loops) that improves the BIC of the largest fraction of persons;
// the path enters the group level when that fraction reaches the
// threshold. The optional subgroup stage clusters persons on the Jaccard
// similarity of their candidate-improvement indicators (agglomerative,
// average linkage, cut chosen by silhouette) and repeats the rule within
// each subgroup. The individual stage then extends each person's model to
// its own BIC optimum. Group paths are contained in subgroup paths, which
// are contained in each member's final path set. Deterministic: identical
// data and options give identical results.
GimmeResult fit_gimme(const IldDataset& data, const GimmeOptions& opts = {});

}  // namespace netpsy

#endif
