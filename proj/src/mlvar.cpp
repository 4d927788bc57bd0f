#include "netpsy/mlvar.hpp"

#include "netpsy/errors.hpp"
#include "netpsy/numeric.hpp"

namespace netpsy {

MlVarResult fit_mlvar(const IldDataset& data, const MlVarOptions& opts) {
  data.validate();
  if (data.persons.size() < 2)
    fail(Errc::invalid_argument, "multilevel fit needs at least 2 persons");
  const int p = data.p();

  PreprocessOptions prep;
  prep.missing = MissingPolicy::RowDrop;
  prep.center = Centering::None;
  const IldDataset complete = preprocess(data, prep);

  MlVarResult result;
  for (const auto& person : complete.persons) {
    // Person means are taken before centering; they feed the between level.
    const Eigen::VectorXd mean = column_means(person.values);
    PersonSeries centered = person;
    centered.values.rowwise() -= mean.transpose();
    try {
      GvarOptions gopts;
      gopts.var = opts.var;
      const LagPairs pairs = build_lag_pairs(centered, opts.night_break);
      MlVarResult::PersonFit fit;
      fit.id = person.id;
      fit.mean = mean;
      fit.model = fit_gvar(pairs, gopts);
      result.persons.push_back(std::move(fit));
    } catch (const Error& e) {
      result.failed.emplace_back(person.id, e.what());
      result.warnings.push_back("person '" + person.id +
                                "' excluded from aggregates: " + e.what());
    }
  }
  if (result.persons.size() < 2)
    fail(Errc::insufficient_observations,
         "fewer than 2 persons remain after per-person failures");

  const int n = static_cast<int>(result.persons.size());
  result.fixed_b = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd mean_precision = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd means(n, p);
  for (int k = 0; k < n; ++k) {
    const auto& fit = result.persons[k];
    result.fixed_b += fit.model.var.b;
    // The per-person theta passed the SPD check inside fit_gvar, so the
    // solve below cannot fail.
    mean_precision += fit.model.var.theta.llt().solve(
        Eigen::MatrixXd::Identity(p, p));
    means.row(k) = fit.mean.transpose();
  }
  result.fixed_b /= static_cast<double>(n);
  mean_precision /= static_cast<double>(n);
  mean_precision = 0.5 * (mean_precision + mean_precision.transpose());
  result.fixed_contemporaneous = ggm_from_precision(mean_precision);

  try {
    result.between = partial_corr_network(sample_covariance(means));
  } catch (const Error& e) {
    throw Error(e.code(),
                std::string("between-person network of the person means: ") +
                    e.what());
  }
  return result;
}

}  // namespace netpsy
