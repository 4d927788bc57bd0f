#include "netpsy/gimme.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "netpsy/errors.hpp"
#include "netpsy/numeric.hpp"
#include "netpsy/var.hpp"

namespace netpsy {

namespace {

// A directed path in the unified SEM. Contemporaneous: target regresses on
// source at the same occasion; temporal: on the source one lag back.
struct Path {
  bool temporal = false;
  int target = 0;
  int source = 0;

  bool operator==(const Path& o) const {
    return temporal == o.temporal && target == o.target && source == o.source;
  }
  bool operator<(const Path& o) const {
    if (temporal != o.temporal) return temporal && !o.temporal;  // temporal first
    if (target != o.target) return target < o.target;
    return source < o.source;
  }
};

// Per-person sufficient statistics. The extended design per lag-pair row is
// [x_t (P), x_{t-1} (P), 1]; every equation's residual sum of squares is a
// Schur complement in its Gram matrix, so candidate evaluations never touch
// the raw data again.
struct PersonData {
  int n = 0;
  Eigen::MatrixXd gram;  // (2P+1) x (2P+1)
};

constexpr double kRssFloor = 1e-12;

int predictor_column(const Path& path, int p) {
  return path.temporal ? p + path.source : path.source;
}

// RSS of regressing variable `target` on the extended-design columns in
// `predictors` (the intercept column must be included by the caller).
// Returns a negative value when the normal equations are singular.
double rss_for(const PersonData& person, int target, const std::vector<int>& predictors) {
  const double syy = person.gram(target, target);
  if (predictors.empty()) return syy;
  const int k = static_cast<int>(predictors.size());
  Eigen::MatrixXd gxx(k, k);
  Eigen::VectorXd gxy(k);
  for (int a = 0; a < k; ++a) {
    gxy(a) = person.gram(predictors[a], target);
    for (int b = 0; b < k; ++b) gxx(a, b) = person.gram(predictors[a], predictors[b]);
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gxx);
  if (ldlt.info() != Eigen::Success) return -1.0;
  const Eigen::VectorXd beta = ldlt.solve(gxy);
  if (!beta.allFinite()) return -1.0;
  const double rss = syy - gxy.dot(beta);
  return std::max(rss, 0.0);
}

// Model structure of one person: selected paths grouped by equation.
struct Structure {
  int p = 0;
  std::set<Path> paths;

  std::vector<int> equation_predictors(int target, int intercept_col) const {
    std::vector<int> cols;
    for (const auto& path : paths)
      if (path.target == target) cols.push_back(predictor_column(path, p));
    cols.push_back(intercept_col);
    return cols;
  }

  // Would adding contemporaneous source -> target close a directed cycle?
  // True iff target already reaches source through contemporaneous edges.
  bool creates_cycle(int target, int source) const {
    std::vector<std::vector<int>> out(p);
    for (const auto& path : paths)
      if (!path.temporal) out[path.source].push_back(path.target);
    std::vector<int> stack{target};
    std::vector<bool> seen(p, false);
    seen[target] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (v == source) return true;
      for (int w : out[v])
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
    return false;
  }
};

double equation_rss(const PersonData& person, const Structure& s, int target) {
  const int intercept = 2 * s.p;
  const double rss = rss_for(person, target, s.equation_predictors(target, intercept));
  return rss < 0.0 ? -1.0 : std::max(rss, kRssFloor);
}

// Change in the person's BIC from adding one path: only the target
// equation's residual variance moves, plus one parameter.
double delta_bic(const PersonData& person, const Structure& current, const Path& path) {
  const int intercept = 2 * current.p;
  std::vector<int> cols = current.equation_predictors(path.target, intercept);
  const double rss_old = rss_for(person, path.target, cols);
  cols.insert(cols.end() - 1, predictor_column(path, current.p));
  const double rss_new = rss_for(person, path.target, cols);
  if (rss_old < 0.0 || rss_new < 0.0) return 0.0;  // singular: not an improvement
  const double n = person.n;
  return n * std::log(std::max(rss_new, kRssFloor) / std::max(rss_old, kRssFloor)) +
         std::log(n);
}

double person_log_lik(const PersonData& person, const Structure& s) {
  const double n = person.n;
  double ll = 0.0;
  for (int i = 0; i < s.p; ++i) {
    const double rss = equation_rss(person, s, i);
    ll += -0.5 * n * (std::log(2.0 * M_PI * rss / n) + 1.0);
  }
  return ll;
}

double person_bic(const PersonData& person, const Structure& s) {
  // Free parameters: selected paths, P intercepts, P residual variances.
  const double k = static_cast<double>(s.paths.size()) + 2.0 * s.p;
  return -2.0 * person_log_lik(person, s) + k * std::log(static_cast<double>(person.n));
}

std::vector<Path> all_candidates(int p) {
  std::vector<Path> cands;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) cands.push_back({true, i, j});
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) cands.push_back({false, i, j});
  return cands;
}

// Average-linkage agglomeration with Lance-Williams updates. Returns the
// merge sequence (slot b folded into slot a); a cut at k clusters replays
// the first n - k merges. Ties take the lexicographically first pair, so
// the dendrogram is deterministic.
std::vector<std::pair<int, int>> agglomerate_average_linkage(Eigen::MatrixXd dist) {
  const int n = static_cast<int>(dist.rows());
  std::vector<bool> active(n, true);
  std::vector<int> size(n, 1);
  std::vector<std::pair<int, int>> merges;
  for (int step = 0; step < n - 1; ++step) {
    double best = std::numeric_limits<double>::infinity();
    int ba = -1, bb = -1;
    for (int a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (int b = a + 1; b < n; ++b)
        if (active[b] && dist(a, b) < best - 1e-15) {
          best = dist(a, b);
          ba = a;
          bb = b;
        }
    }
    for (int c = 0; c < n; ++c)
      if (active[c] && c != ba && c != bb)
        dist(ba, c) = dist(c, ba) =
            (size[ba] * dist(ba, c) + size[bb] * dist(bb, c)) /
            static_cast<double>(size[ba] + size[bb]);
    size[ba] += size[bb];
    active[bb] = false;
    merges.emplace_back(ba, bb);
  }
  return merges;
}

std::vector<int> cut_labels(const std::vector<std::pair<int, int>>& merges, int n,
                            int k) {
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int step = 0; step < n - k; ++step)
    parent[find(merges[step].second)] = find(merges[step].first);
  // Stable relabeling: subgroup index ordered by smallest member.
  std::vector<int> labels(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (labels[root] < 0) labels[root] = next++;
  }
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = labels[find(i)];
  return out;
}

double mean_silhouette(const Eigen::MatrixXd& dist, const std::vector<int>& labels,
                       int k) {
  const int n = static_cast<int>(dist.rows());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<int> count(k, 0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += dist(i, j);
      ++count[labels[j]];
    }
    if (count[labels[i]] == 0) continue;  // singleton: silhouette 0
    const double a = sum[labels[i]] / count[labels[i]];
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c)
      if (c != labels[i] && count[c] > 0) b = std::min(b, sum[c] / count[c]);
    const double denom = std::max(a, b);
    if (denom > 0.0 && std::isfinite(b)) total += (b - a) / denom;
  }
  return total / n;
}

}  // namespace

GimmeResult fit_gimme(const IldDataset& data, const GimmeOptions& opts) {
  data.validate();
  if (opts.group_threshold <= 0.0 || opts.group_threshold > 1.0)
    fail(Errc::invalid_argument, "group_threshold must lie in (0, 1]");
  const int n_persons = static_cast<int>(data.persons.size());
  if (n_persons < 3) fail(Errc::invalid_argument, "need at least 3 persons");
  const int p = data.p();
  const int max_paths = opts.max_paths > 0 ? opts.max_paths : 2 * p * p;

  PreprocessOptions prep;
  prep.missing = MissingPolicy::RowDrop;
  const IldDataset complete = preprocess(data, prep);

  std::vector<PersonData> persons(n_persons);
  GimmeResult result;
  for (int k = 0; k < n_persons; ++k) {
    const auto& series = complete.persons[k];
    result.person_ids.push_back(series.id);
    const LagPairs pairs = build_lag_pairs(series, opts.night_break);
    if (pairs.n() < 2 * p + 2)
      fail(Errc::insufficient_observations,
           "person '" + series.id + "' has " + std::to_string(pairs.n()) +
               " lag pairs; unified SEM regressions need at least " +
               std::to_string(2 * p + 2));
    Eigen::MatrixXd design(pairs.n(), 2 * p + 1);
    design.leftCols(p) = pairs.cur;
    design.middleCols(p, p) = pairs.prev;
    design.col(2 * p).setOnes();
    persons[k].n = pairs.n();
    persons[k].gram = design.transpose() * design;
  }

  const std::vector<Path> candidates = all_candidates(p);
  std::vector<Structure> models(n_persons);
  for (auto& m : models) m.p = p;

  std::set<std::pair<int, int>> rejected_seen;
  auto record_rejection = [&](const std::string& stage, const Path& path) {
    if (rejected_seen.insert({path.target, path.source}).second)
      result.cycle_rejected.push_back({stage, path.target, path.source});
  };

  // Forward selection shared by the group and subgroup stages: repeatedly
  // add the candidate improving the BIC of the largest fraction of
  // `members`, while that fraction reaches the threshold. All members share
  // one structure here, so the cycle check uses the first member's model.
  auto select_shared = [&](const std::vector<int>& members, const std::string& stage,
                           std::set<Path>& added_into) {
    while (static_cast<int>(models[members.front()].paths.size()) < max_paths) {
      const Structure& shared = models[members.front()];
      double best_fraction = -1.0, best_mean_drop = 0.0;
      const Path* best = nullptr;
      for (const auto& cand : candidates) {
        if (shared.paths.count(cand)) continue;
        if (!cand.temporal && shared.creates_cycle(cand.target, cand.source)) {
          record_rejection(stage, cand);
          continue;
        }
        int improved = 0;
        double drop_sum = 0.0;
        for (int m : members) {
          const double d = delta_bic(persons[m], models[m], cand);
          if (d < 0.0) {
            ++improved;
            drop_sum += -d;
          }
        }
        const double fraction =
            static_cast<double>(improved) / static_cast<double>(members.size());
        const double mean_drop = improved > 0 ? drop_sum / improved : 0.0;
        if (fraction > best_fraction + 1e-12 ||
            (std::abs(fraction - best_fraction) <= 1e-12 &&
             mean_drop > best_mean_drop + 1e-12)) {
          best_fraction = fraction;
          best_mean_drop = mean_drop;
          best = &cand;
        }
      }
      if (!best || best_fraction + 1e-12 < opts.group_threshold) break;
      for (int m : members) models[m].paths.insert(*best);
      added_into.insert(*best);
    }
  };

  // Group stage.
  std::vector<int> everyone(n_persons);
  for (int i = 0; i < n_persons; ++i) everyone[i] = i;
  std::set<Path> group_paths;
  select_shared(everyone, "group", group_paths);
  if (group_paths.empty())
    result.warnings.push_back(
        "NoGroupPath: no candidate improved BIC for the required fraction of "
        "persons; group level is empty");
  for (int m = 0; m < n_persons; ++m)
    result.fit_records.push_back({result.person_ids[m], "group",
                                  person_log_lik(persons[m], models[m]),
                                  person_bic(persons[m], models[m]),
                                  static_cast<int>(models[m].paths.size())});

  // Subgroup stage.
  std::vector<std::set<Path>> subgroup_paths;
  if (opts.subgroup) {
    result.has_subgroups = true;
    // Indicator per person: candidate paths whose single-step addition to
    // the group model improves that person's BIC.
    std::vector<std::vector<bool>> indicator(
        n_persons, std::vector<bool>(candidates.size(), false));
    for (int m = 0; m < n_persons; ++m)
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const Path& cand = candidates[c];
        if (models[m].paths.count(cand)) continue;
        if (!cand.temporal && models[m].creates_cycle(cand.target, cand.source))
          continue;
        indicator[m][c] = delta_bic(persons[m], models[m], cand) < 0.0;
      }

    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n_persons, n_persons);
    for (int a = 0; a < n_persons; ++a)
      for (int b = a + 1; b < n_persons; ++b) {
        int inter = 0, uni = 0;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          inter += indicator[a][c] && indicator[b][c];
          uni += indicator[a][c] || indicator[b][c];
        }
        const double jaccard = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
        dist(a, b) = dist(b, a) = 1.0 - jaccard;
      }

    const std::vector<std::pair<int, int>> merges = agglomerate_average_linkage(dist);
    double best_sil = 0.0;
    std::vector<int> best_labels(n_persons, 0);
    int best_k = 1;
    for (int k = 2; k < n_persons; ++k) {
      const std::vector<int> labels = cut_labels(merges, n_persons, k);
      const double sil = mean_silhouette(dist, labels, k);
      if (sil > best_sil + 1e-12) {
        best_sil = sil;
        best_labels = labels;
        best_k = k;
      }
    }
    result.subgroup_of = best_labels;
    // Subgroup models extend the group model, so the exported subgroup
    // structures contain the group paths.
    subgroup_paths.assign(best_k, group_paths);
    for (int c = 0; c < best_k; ++c) {
      std::vector<int> members;
      for (int m = 0; m < n_persons; ++m)
        if (best_labels[m] == c) members.push_back(m);
      if (members.size() >= 2)
        select_shared(members, "subgroup", subgroup_paths[c]);
    }
    for (int m = 0; m < n_persons; ++m)
      result.fit_records.push_back({result.person_ids[m], "subgroup",
                                    person_log_lik(persons[m], models[m]),
                                    person_bic(persons[m], models[m]),
                                    static_cast<int>(models[m].paths.size())});
  }

  // Individual stage: greedy BIC descent per person.
  for (int m = 0; m < n_persons; ++m) {
    while (static_cast<int>(models[m].paths.size()) < max_paths) {
      double best_drop = 0.0;
      const Path* best = nullptr;
      for (const auto& cand : candidates) {
        if (models[m].paths.count(cand)) continue;
        if (!cand.temporal && models[m].creates_cycle(cand.target, cand.source)) {
          record_rejection("individual", cand);
          continue;
        }
        const double d = delta_bic(persons[m], models[m], cand);
        if (d < -1e-12 && -d > best_drop + 1e-12) {
          best_drop = -d;
          best = &cand;
        }
      }
      if (!best) break;
      models[m].paths.insert(*best);
    }
    result.fit_records.push_back({result.person_ids[m], "individual",
                                  person_log_lik(persons[m], models[m]),
                                  person_bic(persons[m], models[m]),
                                  static_cast<int>(models[m].paths.size())});
  }

  // Final per-person estimates: per-node least squares, valid because the
  // contemporaneous structure is acyclic.
  auto binary_of = [&](const std::set<Path>& paths, bool temporal) {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(p, p);
    for (const auto& path : paths)
      if (path.temporal == temporal) m(path.target, path.source) = 1;
    return m;
  };
  result.group_contemporaneous = binary_of(group_paths, false);
  result.group_temporal = binary_of(group_paths, true);
  for (const auto& paths : subgroup_paths) {
    result.subgroup_contemporaneous.push_back(binary_of(paths, false));
    result.subgroup_temporal.push_back(binary_of(paths, true));
  }

  Eigen::MatrixXd group_con_sum = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd group_tem_sum = Eigen::MatrixXd::Zero(p, p);
  for (int m = 0; m < n_persons; ++m) {
    Eigen::MatrixXd con = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd tem = Eigen::MatrixXd::Zero(p, p);
    const int intercept = 2 * p;
    for (int i = 0; i < p; ++i) {
      std::vector<int> cols = models[m].equation_predictors(i, intercept);
      if (cols.size() == 1) continue;  // intercept only
      const int k = static_cast<int>(cols.size());
      Eigen::MatrixXd gxx(k, k);
      Eigen::VectorXd gxy(k);
      for (int a = 0; a < k; ++a) {
        gxy(a) = persons[m].gram(cols[a], i);
        for (int b = 0; b < k; ++b) gxx(a, b) = persons[m].gram(cols[a], cols[b]);
      }
      const Eigen::VectorXd beta = gxx.ldlt().solve(gxy);
      for (int a = 0; a < k - 1; ++a) {
        if (cols[a] < p)
          con(i, cols[a]) = beta(a);
        else
          tem(i, cols[a] - p) = beta(a);
      }
    }
    result.person_contemporaneous.push_back(binary_of(models[m].paths, false));
    result.person_temporal.push_back(binary_of(models[m].paths, true));
    result.person_contemporaneous_coef.push_back(con);
    result.person_temporal_coef.push_back(tem);
    group_con_sum += con.cwiseProduct(result.group_contemporaneous.cast<double>());
    group_tem_sum += tem.cwiseProduct(result.group_temporal.cast<double>());
  }
  result.group_contemporaneous_coef = group_con_sum / static_cast<double>(n_persons);
  result.group_temporal_coef = group_tem_sum / static_cast<double>(n_persons);
  return result;
}

}  // namespace netpsy
