#include "netpsy/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netpsy/dataset.hpp"
#include "netpsy/errors.hpp"
#include "netpsy/ggm.hpp"
#include "netpsy/gimme.hpp"
#include "netpsy/idiographic.hpp"
#include "netpsy/io.hpp"
#include "netpsy/ising.hpp"
#include "netpsy/mlvar.hpp"
#include "netpsy/numeric.hpp"
#include "netpsy/recurrence.hpp"
#include "netpsy/rng.hpp"
#include "netpsy/var.hpp"

namespace netpsy {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------
// Config access. Every getter reports the dotted key path on failure and
// every block parser starts by rejecting keys outside its schema, so a
// typo anywhere in the config surfaces as UnknownKey rather than as a
// silently applied default.

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    fail(Errc::invalid_argument, "'" + where + "' must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      fail(Errc::unknown_key, "unknown config key '" + where + "." + item.key() + "'");
  }
}

const json* find_key(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

double num_or(const json& obj, const char* key, double def, const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) return def;
  if (!v->is_number())
    fail(Errc::invalid_argument, "'" + where + "." + key + "' must be a number");
  return v->get<double>();
}

long int_or(const json& obj, const char* key, long def, const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) return def;
  if (!v->is_number_integer())
    fail(Errc::invalid_argument, "'" + where + "." + key + "' must be an integer");
  return v->get<long>();
}

bool bool_or(const json& obj, const char* key, bool def, const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) return def;
  if (!v->is_boolean())
    fail(Errc::invalid_argument, "'" + where + "." + key + "' must be a boolean");
  return v->get<bool>();
}

std::string str_or(const json& obj, const char* key, const std::string& def,
                   const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) return def;
  if (!v->is_string())
    fail(Errc::invalid_argument, "'" + where + "." + key + "' must be a string");
  return v->get<std::string>();
}

std::string require_str(const json& obj, const char* key, const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v)
    fail(Errc::invalid_argument, "'" + where + "." + key + "' is required");
  if (!v->is_string())
    fail(Errc::invalid_argument, "'" + where + "." + key + "' must be a string");
  return v->get<std::string>();
}

std::vector<double> numvec_or(const json& obj, const char* key,
                              const std::vector<double>& def,
                              const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) return def;
  if (!v->is_array())
    fail(Errc::invalid_argument, "'" + where + "." + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number())
      fail(Errc::invalid_argument, "'" + where + "." + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> strvec_or(const json& obj, const char* key,
                                   const std::vector<std::string>& def,
                                   const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) return def;
  if (!v->is_array())
    fail(Errc::invalid_argument, "'" + where + "." + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : *v) {
    if (!e.is_string())
      fail(Errc::invalid_argument, "'" + where + "." + key + "' must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Centering centering_from_name(const std::string& name, const std::string& where) {
  if (name == "none") return Centering::None;
  if (name == "within-person") return Centering::WithinPerson;
  if (name == "global") return Centering::Global;
  fail(Errc::invalid_argument,
       "'" + where + "': expected none|within-person|global, got '" + name + "'");
}

Detrend detrend_from_name(const std::string& name, const std::string& where) {
  if (name == "none") return Detrend::None;
  if (name == "linear") return Detrend::Linear;
  fail(Errc::invalid_argument,
       "'" + where + "': expected none|linear, got '" + name + "'");
}

MissingPolicy missing_from_name(const std::string& name, const std::string& where) {
  if (name == "row-drop") return MissingPolicy::RowDrop;
  if (name == "pairwise") return MissingPolicy::Pairwise;
  fail(Errc::invalid_argument,
       "'" + where + "': expected row-drop|pairwise, got '" + name + "'");
}

GraphWeighting weighting_from_name(const std::string& name, const std::string& where) {
  if (name == "er") return GraphWeighting::ErdosRenyi;
  if (name == "random-cluster") return GraphWeighting::RandomCluster;
  fail(Errc::invalid_argument,
       "'" + where + "': expected er|random-cluster, got '" + name + "'");
}

// ---------------------------------------------------------------------
// Run context: output directory, seed, and the checksums of every file the
// run has read. The manifest makes a run auditable: identical manifest
// implies identical artifacts.

struct RunContext {
  std::string command;
  json config;
  fs::path output_dir;
  std::uint64_t seed = 1;
  std::string config_checksum;
  std::map<std::string, std::string> input_checksums;
};

std::string checksum_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void note_input(RunContext& ctx, const std::string& path) {
  ctx.input_checksums[path] = checksum_hex(read_text_file(path));
}

fs::path out_path(const RunContext& ctx, const std::string& name) {
  return ctx.output_dir / name;
}

void write_json_file(const RunContext& ctx, const std::string& name, const json& j) {
  write_text_file(out_path(ctx, name).string(), j.dump(2) + "\n");
}

void write_manifest(const RunContext& ctx) {
  json inputs = json::object();
  for (const auto& [path, sum] : ctx.input_checksums) inputs[path] = sum;
  json manifest{{"command", ctx.command},
                {"config", ctx.config},
                {"config_checksum", ctx.config_checksum},
                {"inputs", inputs},
                {"seed", ctx.seed},
                {"versions",
                 {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"netpsy", kVersion}}}};
  write_json_file(ctx, "manifest.json", manifest);
}

// Person and group ids appear in artifact file names.
std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                          c == '_' || c == '.'
                      ? c
                      : '_');
  return out.empty() ? std::string("_") : out;
}

// ---------------------------------------------------------------------
// JSON views of library results.

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json imatrix_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json ggm_json(const GgmNetwork& net) {
  return json{{"omega", matrix_json(net.omega)}, {"delta", vector_json(net.delta)}};
}

// ---------------------------------------------------------------------
// Dataset plumbing shared by the data-driven commands.

struct LoadedData {
  IldDataset data;
  PreprocessOptions prep;
};

PreprocessOptions parse_preprocess(const json& cfg) {
  PreprocessOptions opts;
  const json* block = find_key(cfg, "preprocess");
  if (!block) return opts;
  check_keys(*block, "preprocess", {"center", "detrend", "missing", "night_break"});
  opts.center = centering_from_name(str_or(*block, "center", "none", "preprocess"),
                                    "preprocess.center");
  opts.detrend = detrend_from_name(str_or(*block, "detrend", "none", "preprocess"),
                                   "preprocess.detrend");
  opts.missing = missing_from_name(str_or(*block, "missing", "row-drop", "preprocess"),
                                   "preprocess.missing");
  opts.night_break = bool_or(*block, "night_break", true, "preprocess");
  return opts;
}

LoadedData load_dataset(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "input");
  if (!block)
    fail(Errc::invalid_argument,
         "'" + ctx.command + "' needs an 'input' block in the config");
  check_keys(*block, "input",
             {"path", "id_column", "day_column", "beep_column", "group_column",
              "items", "delimiter"});
  ColumnSchema schema;
  const std::string path = require_str(*block, "path", "input");
  schema.id = str_or(*block, "id_column", "id", "input");
  schema.day = str_or(*block, "day_column", "day", "input");
  schema.beep = str_or(*block, "beep_column", "beep", "input");
  schema.items = strvec_or(*block, "items", {}, "input");
  if (schema.items.empty())
    fail(Errc::invalid_argument, "'input.items' must list at least one item column");
  const std::string group = str_or(*block, "group_column", "", "input");
  if (!group.empty()) schema.group = group;
  const std::string delim = str_or(*block, "delimiter", ",", "input");
  if (delim.size() != 1)
    fail(Errc::invalid_argument, "'input.delimiter' must be a single character");
  schema.delimiter = delim[0];

  note_input(ctx, path);
  LoadedData loaded{load_ild(path, schema), parse_preprocess(cfg)};
  loaded.data = preprocess(loaded.data, loaded.prep);
  return loaded;
}

const PersonSeries& select_person(const IldDataset& data, const std::string& id,
                                  const std::string& where) {
  if (id.empty()) return data.persons.front();
  for (const auto& person : data.persons)
    if (person.id == id) return person;
  fail(Errc::invalid_argument, "'" + where + "': no person with id '" + id + "'");
}

// Complete rows of all persons stacked, for pooled covariance work.
Eigen::MatrixXd pooled_complete_rows(const IldDataset& data) {
  long n = 0;
  for (const auto& person : data.persons)
    for (int r = 0; r < person.t(); ++r)
      if (person.values.row(r).allFinite()) ++n;
  if (n == 0)
    fail(Errc::insufficient_observations, "no complete rows in the dataset");
  Eigen::MatrixXd rows(n, data.p());
  long k = 0;
  for (const auto& person : data.persons)
    for (int r = 0; r < person.t(); ++r)
      if (person.values.row(r).allFinite()) rows.row(k++) = person.values.row(r);
  return rows;
}

// Pairwise-complete covariance: each (j, k) entry uses the rows where both
// items are observed, with means taken over the same rows. The result can
// be indefinite; downstream SPD checks report that honestly.
Eigen::MatrixXd pairwise_covariance(const IldDataset& data) {
  const int p = data.p();
  Eigen::MatrixXd cov(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = j; k < p; ++k) {
      double sj = 0.0, sk = 0.0;
      long n = 0;
      for (const auto& person : data.persons)
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j)) &&
              std::isfinite(person.values(r, k))) {
            sj += person.values(r, j);
            sk += person.values(r, k);
            ++n;
          }
      if (n < 2)
        fail(Errc::insufficient_observations,
             "items '" + data.item_names[j] + "' and '" + data.item_names[k] +
                 "' share fewer than 2 observed rows");
      const double mj = sj / static_cast<double>(n);
      const double mk = sk / static_cast<double>(n);
      double acc = 0.0;
      for (const auto& person : data.persons)
        for (int r = 0; r < person.t(); ++r)
          if (std::isfinite(person.values(r, j)) &&
              std::isfinite(person.values(r, k)))
            acc += (person.values(r, j) - mj) * (person.values(r, k) - mk);
      cov(j, k) = cov(k, j) = acc / static_cast<double>(n - 1);
    }
  return cov;
}

std::vector<std::string> node_names(const IldDataset* data, Eigen::Index p) {
  if (data) return data->item_names;
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < p; ++i) names.push_back("v" + std::to_string(i));
  return names;
}

// ---------------------------------------------------------------------
// Series extraction for the recurrence commands: either a bare CSV matrix
// (rows are states) or one person's rows from the ILD input, optionally
// restricted to one item and delay-embedded.

struct SeriesSpec {
  Eigen::MatrixXd states;
  std::vector<std::string> source;  // item names or column labels
};

SeriesSpec extract_series(const json& cfg, const json& block, const std::string& where,
                          RunContext& ctx) {
  const std::string series_path = str_or(block, "series", "", where);
  const std::string item = str_or(block, "item", "", where);
  const std::string person_id = str_or(block, "person", "", where);
  const long dim = int_or(block, "embedding_dim", 1, where);
  const long delay = int_or(block, "delay", 1, where);
  if (dim < 1 || delay < 1)
    fail(Errc::invalid_argument,
         "'" + where + "': embedding_dim and delay must be >= 1");

  SeriesSpec spec;
  if (!series_path.empty()) {
    if (!item.empty() || !person_id.empty())
      fail(Errc::invalid_argument,
           "'" + where + "': 'series' excludes 'person' and 'item'");
    note_input(ctx, series_path);
    spec.states = read_matrix_csv(series_path);
    for (Eigen::Index c = 0; c < spec.states.cols(); ++c)
      spec.source.push_back("col" + std::to_string(c));
  } else {
    LoadedData loaded = load_dataset(cfg, ctx);
    const PersonSeries& person = select_person(loaded.data, person_id, where);
    if (item.empty()) {
      spec.states = person.values;
      spec.source = loaded.data.item_names;
    } else {
      int j = -1;
      for (int c = 0; c < loaded.data.p(); ++c)
        if (loaded.data.item_names[c] == item) j = c;
      if (j < 0)
        fail(Errc::invalid_argument, "'" + where + "': no item named '" + item + "'");
      spec.states = person.values.col(j);
      spec.source = {item};
    }
  }

  if (dim > 1) {
    if (spec.states.cols() != 1)
      fail(Errc::invalid_argument,
           "'" + where + "': delay embedding needs a univariate series");
    spec.states = embed(spec.states.col(0), static_cast<int>(dim),
                        static_cast<int>(delay));
  }
  return spec;
}

RecurrenceMatrix series_recurrence(const json& block, const std::string& where,
                                   const SeriesSpec& spec, std::string& eps_source) {
  const Norm norm = norm_from_name(str_or(block, "norm", "euclidean", where));
  const json* eps_key = find_key(block, "epsilon");
  const json* rr_key = find_key(block, "target_rr");
  if (eps_key && rr_key)
    fail(Errc::invalid_argument,
         "'" + where + "': give either 'epsilon' or 'target_rr', not both");
  double epsilon;
  if (eps_key) {
    epsilon = num_or(block, "epsilon", 0.0, where);
    eps_source = "config";
  } else {
    const double target = num_or(block, "target_rr", 0.1, where);
    if (target <= 0.0 || target >= 1.0)
      fail(Errc::invalid_argument, "'" + where + ".target_rr' must be in (0, 1)");
    epsilon = choose_epsilon(spec.states, target, norm);
    eps_source = "target-rr";
  }
  return recurrence_matrix(spec.states, epsilon, norm);
}

void write_recurrence_csv(const RunContext& ctx, const std::string& name,
                          const RecurrenceMatrix& rm) {
  write_matrix_csv(out_path(ctx, name).string(), rm.r.cast<double>());
}

// ---------------------------------------------------------------------
// Network export bundles.

void export_undirected(const RunContext& ctx, const std::string& stem,
                       const Eigen::MatrixXd& weights,
                       const std::vector<std::string>& names, double threshold) {
  write_matrix_csv(out_path(ctx, stem + ".csv").string(), weights);
  write_graphml_undirected(out_path(ctx, stem + ".graphml").string(), weights, names,
                           threshold);
  write_dot_undirected(out_path(ctx, stem + ".dot").string(), weights, names,
                       threshold);
}

void export_directed(const RunContext& ctx, const std::string& stem,
                     const Eigen::MatrixXd& weights,
                     const std::vector<std::string>& names, double threshold,
                     const std::vector<std::vector<std::string>>* levels = nullptr) {
  write_matrix_csv(out_path(ctx, stem + ".csv").string(), weights);
  write_graphml_directed(out_path(ctx, stem + ".graphml").string(), weights, names,
                         threshold, levels);
  write_dot_directed(out_path(ctx, stem + ".dot").string(), weights, names, threshold);
}

// ---------------------------------------------------------------------
// Command handlers. Each reads its own config block, runs the module
// operations, and writes artifacts plus a <command>.json summary.

void cmd_ising(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "ising");
  json b = block ? *block : json::object();
  check_keys(b, "ising",
             {"action", "params", "coding", "target_coding", "shift", "quad_points",
              "n_samples", "burn_in", "penalty"});
  const std::string action = str_or(b, "action", "pmf", "ising");
  json summary{{"command", "ising"}, {"action", action}};

  if (action == "fit") {
    const Coding coding = coding_from_name(str_or(b, "coding", "zero-one", "ising"));
    LoadedData loaded = load_dataset(cfg, ctx);
    const Eigen::MatrixXd rows = pooled_complete_rows(loaded.data);
    Eigen::MatrixXi data(rows.rows(), rows.cols());
    const int lo = coding == Coding::ZeroOne ? 0 : -1;
    for (Eigen::Index r = 0; r < rows.rows(); ++r)
      for (Eigen::Index c = 0; c < rows.cols(); ++c) {
        const double v = rows(r, c);
        if (v != lo && v != 1)
          fail(Errc::invalid_argument,
               "ising fit: values must be " + std::to_string(lo) + "/1 under " +
                   coding_name(coding) + " coding");
        data(r, c) = static_cast<int>(v);
      }
    const double penalty = num_or(b, "penalty", 0.0, "ising");
    const IsingFit fit = ising_fit_pl(data, coding, penalty);
    save_ising_params(fit.params, out_path(ctx, "params_fit.json").string());
    summary["n_rows"] = rows.rows();
    summary["penalty"] = penalty;
    summary["separation_detected"] = fit.separation_detected;
    summary["warnings"] = fit.warnings;
    write_json_file(ctx, "ising.json", summary);
    return;
  }

  const std::string params_path = require_str(b, "params", "ising");
  note_input(ctx, params_path);
  const IsingParams params = load_ising_params(params_path);
  summary["p"] = params.p();
  summary["coding"] = coding_name(params.coding);

  if (action == "pmf") {
    const Pmf pmf = ising_pmf_exact(params);
    write_pmf_csv(out_path(ctx, "pmf.csv").string(), pmf);
    summary["n_configs"] = pmf.probs.size();
  } else if (action == "mirt") {
    const double shift = num_or(b, "shift", -1.0, "ising");
    const long quad_points = int_or(b, "quad_points", 80, "ising");
    const MirtParams mirt = ising_to_mirt(params, shift);
    const Pmf direct = ising_pmf_exact(ising_recode(params, Coding::ZeroOne));
    const Pmf marginal =
        mirt_marginal_pmf(mirt, params.p(), static_cast<int>(quad_points));
    write_pmf_csv(out_path(ctx, "pmf.csv").string(), direct);
    write_pmf_csv(out_path(ctx, "mirt_pmf.csv").string(), marginal);
    write_json_file(ctx, "mirt.json",
                    json{{"intercepts", vector_json(mirt.intercepts)},
                         {"loadings", matrix_json(mirt.loadings)},
                         {"eigenvalues", vector_json(mirt.eigenvalues)},
                         {"shift_c", mirt.shift_c},
                         {"r", mirt.loadings.cols()}});
    summary["r"] = mirt.loadings.cols();
    summary["shift_c"] = mirt.shift_c;
    summary["tv_vs_exact"] = total_variation(direct.probs, marginal.probs);
  } else if (action == "recode") {
    const Coding target =
        coding_from_name(str_or(b, "target_coding", "zero-one", "ising"));
    save_ising_params(ising_recode(params, target),
                      out_path(ctx, "params_recoded.json").string());
    summary["target_coding"] = coding_name(target);
  } else if (action == "sample") {
    const long n = int_or(b, "n_samples", 1000, "ising");
    const long burn_in = int_or(b, "burn_in", 500, "ising");
    if (n < 1 || burn_in < 0)
      fail(Errc::invalid_argument, "'ising': n_samples >= 1 and burn_in >= 0");
    Rng rng(ctx.seed);
    const Eigen::MatrixXi samples =
        ising_gibbs(params, static_cast<int>(n), static_cast<int>(burn_in), rng);
    write_matrix_csv(out_path(ctx, "samples.csv").string(), samples.cast<double>());
    summary["n_samples"] = n;
    summary["burn_in"] = burn_in;
  } else {
    fail(Errc::invalid_argument,
         "'ising.action': expected pmf|mirt|recode|sample|fit, got '" + action + "'");
  }
  write_json_file(ctx, "ising.json", summary);
}

void cmd_ggm(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "ggm");
  json b = block ? *block : json::object();
  check_keys(b, "ggm", {"covariance", "ridge", "threshold", "saturation_tol"});
  const double ridge = num_or(b, "ridge", 0.0, "ggm");
  const double threshold = num_or(b, "threshold", 0.0, "ggm");
  const double sat_tol = num_or(b, "saturation_tol", 0.01, "ggm");
  const std::string cov_path = str_or(b, "covariance", "", "ggm");

  Eigen::MatrixXd cov;
  std::vector<std::string> names;
  long n_rows = -1;
  if (!cov_path.empty()) {
    note_input(ctx, cov_path);
    cov = read_matrix_csv(cov_path);
    names = node_names(nullptr, cov.rows());
  } else {
    LoadedData loaded = load_dataset(cfg, ctx);
    if (loaded.prep.missing == MissingPolicy::Pairwise) {
      cov = pairwise_covariance(loaded.data);
    } else {
      const Eigen::MatrixXd rows = pooled_complete_rows(loaded.data);
      n_rows = rows.rows();
      cov = sample_covariance(rows);
    }
    names = loaded.data.item_names;
  }

  const GgmNetwork net = partial_corr_network(cov, ridge);
  export_undirected(ctx, "ggm_network", net.omega, names, threshold);
  write_matrix_csv(out_path(ctx, "ggm_delta.csv").string(),
                   net.delta.asDiagonal().toDenseMatrix());
  const SaturationReport sat = saturation_check(net, sat_tol);

  json summary{{"command", "ggm"},
               {"p", net.p()},
               {"ridge", ridge},
               {"delta", vector_json(net.delta)},
               {"density", network_density(net.omega)},
               {"saturated", sat.saturated},
               {"near_zero_pairs", sat.near_zero_count},
               {"saturation_tol", sat_tol}};
  if (n_rows >= 0) summary["n_rows"] = n_rows;
  write_json_file(ctx, "ggm.json", summary);
}

void cmd_gvar(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "gvar");
  json b = block ? *block : json::object();
  check_keys(b, "gvar",
             {"person", "ridge", "force_b_zero", "threshold", "min_t_factor"});
  const std::string person_id = str_or(b, "person", "", "gvar");
  const double threshold = num_or(b, "threshold", 0.0, "gvar");
  GvarOptions opts;
  opts.ridge = num_or(b, "ridge", 0.0, "gvar");
  opts.force_b_zero = bool_or(b, "force_b_zero", false, "gvar");
  opts.var.min_t_factor = static_cast<int>(int_or(b, "min_t_factor", 3, "gvar"));

  LoadedData loaded = load_dataset(cfg, ctx);
  const PersonSeries& person = select_person(loaded.data, person_id, "gvar");
  const LagPairs pairs = build_lag_pairs(person, loaded.prep.night_break);
  const GvarModel model = fit_gvar(pairs, opts);
  const std::vector<std::string>& names = loaded.data.item_names;

  export_directed(ctx, "gvar_temporal", model.var.b, names, threshold);
  export_undirected(ctx, "gvar_contemporaneous", model.contemporaneous.omega, names,
                    threshold);
  write_matrix_csv(out_path(ctx, "gvar_theta.csv").string(), model.var.theta);

  write_json_file(
      ctx, "gvar.json",
      json{{"command", "gvar"},
           {"person", person.id},
           {"n_lag_pairs", pairs.n()},
           {"intercept", vector_json(model.var.intercept)},
           {"stable", model.var.stable},
           {"force_b_zero", opts.force_b_zero},
           {"delta", vector_json(model.contemporaneous.delta)},
           {"density",
            {{"temporal", network_density(model.var.b)},
             {"temporal_diagonal", diagonal_density(model.var.b)},
             {"contemporaneous", network_density(model.contemporaneous.omega)}}}});
}

json mlvar_group_summary(const MlVarResult& fit) {
  json failed = json::array();
  for (const auto& [id, reason] : fit.failed)
    failed.push_back(json{{"person", id}, {"reason", reason}});
  return json{{"n_persons", fit.persons.size()},
              {"failed", failed},
              {"warnings", fit.warnings},
              {"density",
               {{"temporal", network_density(fit.fixed_b)},
                {"temporal_diagonal", diagonal_density(fit.fixed_b)},
                {"contemporaneous", network_density(fit.fixed_contemporaneous.omega)},
                {"between", network_density(fit.between.omega)}}}};
}

void export_mlvar_fit(const RunContext& ctx, const std::string& prefix,
                      const MlVarResult& fit, const std::vector<std::string>& names,
                      double threshold) {
  export_directed(ctx, prefix + "temporal", fit.fixed_b, names, threshold);
  export_undirected(ctx, prefix + "contemporaneous", fit.fixed_contemporaneous.omega,
                    names, threshold);
  export_undirected(ctx, prefix + "between", fit.between.omega, names, threshold);
}

void cmd_mlvar(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "mlvar");
  json b = block ? *block : json::object();
  check_keys(b, "mlvar", {"threshold", "min_t_factor"});
  const double threshold = num_or(b, "threshold", 0.0, "mlvar");
  MlVarOptions opts;
  opts.var.min_t_factor = static_cast<int>(int_or(b, "min_t_factor", 3, "mlvar"));

  LoadedData loaded = load_dataset(cfg, ctx);
  opts.night_break = loaded.prep.night_break;
  const std::vector<std::string>& names = loaded.data.item_names;

  json summary{{"command", "mlvar"}, {"threshold", threshold}};
  if (loaded.data.has_groups()) {
    // One three-network panel per group, fitted independently.
    std::vector<std::string> group_order;
    for (const auto& person : loaded.data.persons) {
      const std::string& g = *person.group;
      bool seen = false;
      for (const auto& known : group_order) seen = seen || known == g;
      if (!seen) group_order.push_back(g);
    }
    json groups = json::object();
    for (const auto& g : group_order) {
      IldDataset subset;
      subset.item_names = loaded.data.item_names;
      subset.beeps_per_day = loaded.data.beeps_per_day;
      subset.has_day_index = loaded.data.has_day_index;
      for (const auto& person : loaded.data.persons)
        if (*person.group == g) subset.persons.push_back(person);
      const MlVarResult fit = fit_mlvar(subset, opts);
      export_mlvar_fit(ctx, "mlvar_" + safe_name(g) + "_", fit, names, threshold);
      groups[g] = mlvar_group_summary(fit);
    }
    summary["groups"] = groups;
  } else {
    const MlVarResult fit = fit_mlvar(loaded.data, opts);
    export_mlvar_fit(ctx, "mlvar_", fit, names, threshold);
    summary["overall"] = mlvar_group_summary(fit);
  }
  write_json_file(ctx, "mlvar.json", summary);
}

// Edge level labels for the GIMME exports: each selected path is tagged
// with the innermost stage that introduced it.
std::vector<std::vector<std::string>> gimme_levels(const Eigen::MatrixXi& person,
                                                   const Eigen::MatrixXi& subgroup,
                                                   const Eigen::MatrixXi& group) {
  const Eigen::Index p = person.rows();
  std::vector<std::vector<std::string>> levels(
      static_cast<std::size_t>(p),
      std::vector<std::string>(static_cast<std::size_t>(p)));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      const char* level = "";
      if (group(i, j)) level = "group";
      else if (subgroup.size() > 0 && subgroup(i, j)) level = "subgroup";
      else if (person(i, j)) level = "individual";
      levels[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = level;
    }
  return levels;
}

void cmd_gimme(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "gimme");
  json b = block ? *block : json::object();
  check_keys(b, "gimme", {"group_threshold", "subgroup", "max_paths", "threshold"});
  GimmeOptions opts;
  opts.group_threshold = num_or(b, "group_threshold", 0.75, "gimme");
  opts.subgroup = bool_or(b, "subgroup", false, "gimme");
  opts.max_paths = static_cast<int>(int_or(b, "max_paths", 0, "gimme"));
  const double threshold = num_or(b, "threshold", 0.0, "gimme");

  LoadedData loaded = load_dataset(cfg, ctx);
  opts.night_break = loaded.prep.night_break;
  const GimmeResult result = fit_gimme(loaded.data, opts);
  const std::vector<std::string>& names = loaded.data.item_names;

  write_matrix_csv(out_path(ctx, "gimme_group_contemporaneous.csv").string(),
                   result.group_contemporaneous.cast<double>());
  write_matrix_csv(out_path(ctx, "gimme_group_temporal.csv").string(),
                   result.group_temporal.cast<double>());
  export_directed(ctx, "gimme_group_contemporaneous_coef",
                  result.group_contemporaneous_coef, names, threshold);
  export_directed(ctx, "gimme_group_temporal_coef", result.group_temporal_coef,
                  names, threshold);

  const Eigen::MatrixXi none;
  for (std::size_t i = 0; i < result.person_ids.size(); ++i) {
    const std::string stem = "gimme_person_" + safe_name(result.person_ids[i]);
    const Eigen::MatrixXi& sub_c =
        result.has_subgroups ? result.subgroup_contemporaneous[static_cast<std::size_t>(
                                   result.subgroup_of[i])]
                             : none;
    const Eigen::MatrixXi& sub_t =
        result.has_subgroups
            ? result.subgroup_temporal[static_cast<std::size_t>(result.subgroup_of[i])]
            : none;
    const auto levels_c = gimme_levels(result.person_contemporaneous[i], sub_c,
                                       result.group_contemporaneous);
    const auto levels_t =
        gimme_levels(result.person_temporal[i], sub_t, result.group_temporal);
    write_matrix_csv(out_path(ctx, stem + "_contemporaneous.csv").string(),
                     result.person_contemporaneous_coef[i]);
    write_matrix_csv(out_path(ctx, stem + "_temporal.csv").string(),
                     result.person_temporal_coef[i]);
    write_graphml_directed(out_path(ctx, stem + "_contemporaneous.graphml").string(),
                           result.person_contemporaneous_coef[i], names, threshold,
                           &levels_c);
    write_graphml_directed(out_path(ctx, stem + "_temporal.graphml").string(),
                           result.person_temporal_coef[i], names, threshold,
                           &levels_t);
  }

  json fit_records = json::array();
  for (const auto& rec : result.fit_records)
    fit_records.push_back(json{{"person", rec.person},
                               {"stage", rec.stage},
                               {"log_lik", rec.log_lik},
                               {"bic", rec.bic},
                               {"n_paths", rec.n_paths}});
  json cycles = json::array();
  for (const auto& rej : result.cycle_rejected)
    cycles.push_back(json{
        {"stage", rej.stage}, {"target", rej.target}, {"source", rej.source}});
  json subgroups = json::array();
  for (int s = 0; s < result.n_subgroups(); ++s)
    subgroups.push_back(
        json{{"contemporaneous", imatrix_json(result.subgroup_contemporaneous[s])},
             {"temporal", imatrix_json(result.subgroup_temporal[s])}});

  write_json_file(
      ctx, "gimme.json",
      json{{"command", "gimme"},
           {"person_ids", result.person_ids},
           {"group_threshold", opts.group_threshold},
           {"group",
            {{"contemporaneous", imatrix_json(result.group_contemporaneous)},
             {"temporal", imatrix_json(result.group_temporal)}}},
           {"has_subgroups", result.has_subgroups},
           {"subgroup_of", result.subgroup_of},
           {"subgroups", subgroups},
           {"fit_records", fit_records},
           {"cycle_rejected", cycles},
           {"warnings", result.warnings}});
}

void cmd_idio(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "idio");
  json b = block ? *block : json::object();
  check_keys(b, "idio", {"action", "theta", "mu", "weighting", "n_samples"});
  const std::string action = str_or(b, "action", "pmf", "idio");
  const GraphWeighting weighting = weighting_from_name(
      str_or(b, "weighting", "random-cluster", "idio"), "idio.weighting");
  const std::string theta_path = require_str(b, "theta", "idio");
  note_input(ctx, theta_path);

  LatentTopology topology;
  topology.edge_prob = read_matrix_csv(theta_path);
  topology.p = static_cast<int>(topology.edge_prob.rows());
  topology.validate();
  const std::vector<double> mu_vec = numvec_or(
      b, "mu", std::vector<double>(static_cast<std::size_t>(topology.p), 0.0), "idio");
  if (static_cast<int>(mu_vec.size()) != topology.p)
    fail(Errc::dimension_mismatch, "'idio.mu' must have one entry per node");
  const Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(
      mu_vec.data(), static_cast<Eigen::Index>(mu_vec.size()));

  const Eigen::MatrixXd sigma = theta_to_sigma(topology.edge_prob);
  write_matrix_csv(out_path(ctx, "idio_sigma.csv").string(), sigma);
  write_graphml_undirected(out_path(ctx, "idio_topology.graphml").string(),
                           topology.edge_prob, node_names(nullptr, topology.p));

  json summary{{"command", "idio"},
               {"action", action},
               {"p", topology.p},
               {"weighting",
                weighting == GraphWeighting::ErdosRenyi ? "er" : "random-cluster"}};

  if (action == "pmf") {
    const Pmf pmf = marginal_pmf_exact(topology, mu, weighting);
    write_pmf_csv(out_path(ctx, "idio_pmf.csv").string(), pmf);
    if (weighting == GraphWeighting::RandomCluster) {
      IsingParams params;
      params.mu = mu;
      params.sigma = sigma;
      params.coding = Coding::PlusMinus;
      summary["tv_vs_ising"] =
          total_variation(pmf.probs, ising_pmf_exact(params).probs);
    }
  } else if (action == "sample") {
    const long n = int_or(b, "n_samples", 10000, "idio");
    if (n < 1) fail(Errc::invalid_argument, "'idio.n_samples' must be >= 1");
    Rng rng(ctx.seed);
    const Pmf estimate =
        sample_marginal(topology, mu, weighting, static_cast<int>(n), rng);
    write_pmf_csv(out_path(ctx, "idio_pmf_mc.csv").string(), estimate);
    const RealizedGraph w = sample_er(topology, rng);
    write_graphml_graph(out_path(ctx, "idio_graph.graphml").string(),
                        graph_from_adjacency(w));
    summary["n_samples"] = n;
    if (topology.p <= 4)
      summary["tv_vs_exact"] = total_variation(
          estimate.probs, marginal_pmf_exact(topology, mu, weighting).probs);
  } else {
    fail(Errc::invalid_argument,
         "'idio.action': expected pmf|sample, got '" + action + "'");
  }
  write_json_file(ctx, "idio.json", summary);
}

void cmd_rqa(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "rqa");
  json b = block ? *block : json::object();
  check_keys(b, "rqa",
             {"series", "person", "item", "embedding_dim", "delay", "epsilon",
              "target_rr", "norm", "l_min", "v_min", "theiler_window"});
  const SeriesSpec spec = extract_series(cfg, b, "rqa", ctx);
  std::string eps_source;
  const RecurrenceMatrix rm = series_recurrence(b, "rqa", spec, eps_source);

  RqaOptions opts;
  opts.l_min = static_cast<int>(int_or(b, "l_min", 2, "rqa"));
  opts.v_min = static_cast<int>(int_or(b, "v_min", 2, "rqa"));
  opts.theiler_window = static_cast<int>(int_or(b, "theiler_window", 1, "rqa"));
  const RqaSummary summary = rqa(rm, opts);

  write_pbm(out_path(ctx, "rp.pbm").string(), rm);
  write_recurrence_csv(ctx, "rp.csv", rm);
  write_json_file(ctx, "rqa.json",
                  json{{"command", "rqa"},
                       {"t", rm.t()},
                       {"state_dim", spec.states.cols()},
                       {"source", spec.source},
                       {"epsilon", rm.epsilon},
                       {"epsilon_source", eps_source},
                       {"norm", norm_name(rm.norm)},
                       {"rr", summary.rr},
                       {"det", summary.det},
                       {"l_mean", summary.l_mean},
                       {"lam", summary.lam},
                       {"n_recurrence_points", summary.n_recurrence_points},
                       {"n_diagonal_lines", summary.n_diagonal_lines},
                       {"l_min", summary.l_min},
                       {"v_min", summary.v_min},
                       {"theiler_window", opts.theiler_window}});
}

void cmd_rn(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "rn");
  json b = block ? *block : json::object();
  check_keys(b, "rn",
             {"series", "person", "item", "embedding_dim", "delay", "epsilon",
              "target_rr", "norm"});
  const SeriesSpec spec = extract_series(cfg, b, "rn", ctx);
  std::string eps_source;
  const RecurrenceMatrix rm = series_recurrence(b, "rn", spec, eps_source);

  const Graph g = recurrence_network(rm);
  const RnSummary metrics = rn_metrics(g);
  write_graphml_graph(out_path(ctx, "rn.graphml").string(), g);
  write_json_file(ctx, "rn.json",
                  json{{"command", "rn"},
                       {"epsilon", rm.epsilon},
                       {"epsilon_source", eps_source},
                       {"norm", norm_name(rm.norm)},
                       {"n_nodes", metrics.n_nodes},
                       {"n_edges", metrics.n_edges},
                       {"degree_min", metrics.degree_min},
                       {"degree_max", metrics.degree_max},
                       {"degree_mean", metrics.degree_mean},
                       {"global_clustering", metrics.global_clustering},
                       {"transitivity", metrics.transitivity},
                       {"avg_path_length", metrics.avg_path_length},
                       {"assortativity", metrics.assortativity},
                       {"n_components", metrics.n_components},
                       {"largest_component", metrics.largest_component},
                       {"local_clustering", metrics.local_clustering}});
}

std::string person_label(int index, int total) {
  std::string digits = std::to_string(index + 1);
  const std::string width = std::to_string(total);
  while (digits.size() < width.size()) digits.insert(digits.begin(), '0');
  return "p" + digits;
}

void cmd_simulate(const json& cfg, RunContext& ctx) {
  const json* block = find_key(cfg, "simulate");
  json b = block ? *block : json::object();
  check_keys(b, "simulate",
             {"model", "b", "theta", "nu", "params", "t", "persons", "burn_in",
              "mean_sd", "beeps_per_day", "items"});
  const std::string model = str_or(b, "model", "gvar", "simulate");
  const long t = int_or(b, "t", 500, "simulate");
  const long persons = int_or(b, "persons", 1, "simulate");
  const long beeps_per_day = int_or(b, "beeps_per_day", 0, "simulate");
  if (t < 1 || persons < 1)
    fail(Errc::invalid_argument, "'simulate': t and persons must be >= 1");
  if (beeps_per_day < 0)
    fail(Errc::invalid_argument, "'simulate.beeps_per_day' must be >= 0");

  IldDataset out;
  json summary{{"command", "simulate"},
               {"model", model},
               {"t", t},
               {"persons", persons}};

  if (model == "gvar") {
    const std::string b_path = require_str(b, "b", "simulate");
    const std::string theta_path = require_str(b, "theta", "simulate");
    note_input(ctx, b_path);
    note_input(ctx, theta_path);
    VarModel var;
    var.b = read_matrix_csv(b_path);
    var.theta = read_matrix_csv(theta_path);
    const int p = static_cast<int>(var.b.rows());
    const std::vector<double> nu = numvec_or(
        b, "nu", std::vector<double>(static_cast<std::size_t>(p), 0.0), "simulate");
    if (static_cast<int>(nu.size()) != p)
      fail(Errc::dimension_mismatch, "'simulate.nu' must have one entry per item");
    var.intercept = Eigen::Map<const Eigen::VectorXd>(
        nu.data(), static_cast<Eigen::Index>(nu.size()));
    const long burn_in = int_or(b, "burn_in", 500, "simulate");
    const double mean_sd = num_or(b, "mean_sd", 0.0, "simulate");
    if (mean_sd < 0)
      fail(Errc::invalid_argument, "'simulate.mean_sd' must be >= 0");

    out.item_names = strvec_or(b, "items", node_names(nullptr, p), "simulate");
    if (static_cast<int>(out.item_names.size()) != p)
      fail(Errc::dimension_mismatch, "'simulate.items' must name every column");

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
    for (long i = 0; i < persons; ++i) {
      PersonSeries person;
      person.id = person_label(static_cast<int>(i), static_cast<int>(persons));
      Rng rng(derive_seed(ctx.seed, person.id));
      VarModel person_var = var;
      if (mean_sd > 0) {
        // Shift the stationary mean by a person effect: nu' = nu + (I-B) m.
        Eigen::VectorXd offset(p);
        for (int j = 0; j < p; ++j) offset(j) = mean_sd * rng.normal();
        person_var.intercept += (eye - var.b) * offset;
      }
      person.values = simulate_gvar(person_var, static_cast<int>(t), rng,
                                    static_cast<int>(burn_in));
      for (long r = 0; r < t; ++r) {
        person.day.push_back(beeps_per_day > 0 ? r / beeps_per_day : 0);
        person.beep.push_back(beeps_per_day > 0 ? r % beeps_per_day : r);
      }
      out.persons.push_back(std::move(person));
    }
    summary["mean_sd"] = mean_sd;
    summary["p"] = p;
  } else if (model == "ising") {
    const std::string params_path = require_str(b, "params", "simulate");
    note_input(ctx, params_path);
    const IsingParams params = load_ising_params(params_path);
    const long burn_in = int_or(b, "burn_in", 500, "simulate");
    const int p = params.p();
    out.item_names = strvec_or(b, "items", node_names(nullptr, p), "simulate");
    if (static_cast<int>(out.item_names.size()) != p)
      fail(Errc::dimension_mismatch, "'simulate.items' must name every column");
    for (long i = 0; i < persons; ++i) {
      PersonSeries person;
      person.id = person_label(static_cast<int>(i), static_cast<int>(persons));
      Rng rng(derive_seed(ctx.seed, person.id));
      person.values = ising_gibbs(params, static_cast<int>(t),
                                  static_cast<int>(burn_in), rng)
                          .cast<double>();
      for (long r = 0; r < t; ++r) {
        person.day.push_back(beeps_per_day > 0 ? r / beeps_per_day : 0);
        person.beep.push_back(beeps_per_day > 0 ? r % beeps_per_day : r);
      }
      out.persons.push_back(std::move(person));
    }
    summary["p"] = p;
    summary["coding"] = coding_name(params.coding);
  } else {
    fail(Errc::invalid_argument,
         "'simulate.model': expected gvar|ising, got '" + model + "'");
  }

  out.beeps_per_day =
      beeps_per_day > 0 ? static_cast<int>(beeps_per_day) : static_cast<int>(t);
  out.validate();
  save_ild_csv(out, out_path(ctx, "simulated.csv").string());
  write_json_file(ctx, "simulate.json", summary);
}

// ---------------------------------------------------------------------

void dispatch(const std::string& command, const json& cfg, RunContext& ctx) {
  if (command == "ising") cmd_ising(cfg, ctx);
  else if (command == "ggm") cmd_ggm(cfg, ctx);
  else if (command == "gvar") cmd_gvar(cfg, ctx);
  else if (command == "mlvar") cmd_mlvar(cfg, ctx);
  else if (command == "gimme") cmd_gimme(cfg, ctx);
  else if (command == "idio") cmd_idio(cfg, ctx);
  else if (command == "rqa") cmd_rqa(cfg, ctx);
  else if (command == "rn") cmd_rn(cfg, ctx);
  else if (command == "simulate") cmd_simulate(cfg, ctx);
  else fail(Errc::invalid_argument, "unknown command '" + command + "'");
}

int report_error(const Errc code, const std::string& message) {
  // Error::what() is "<Code>: <detail>"; the code is its own field here.
  const std::string prefix = std::string(errc_name(code)) + ": ";
  const std::string detail =
      message.rfind(prefix, 0) == 0 ? message.substr(prefix.size()) : message;
  json err{{"error", {{"code", errc_name(code)}, {"message", detail}}}};
  std::cerr << err.dump(2) << "\n";
  return errc_is_numeric(code) ? 3 : 2;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"netpsy: cross-sectional, temporal and recurrence networks"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--output-dir", output_dir, "overrides config output_dir");
  app.add_option("--seed", seed, "overrides config seed");

  static const char* kCommands[] = {"ising", "ggm",  "gvar", "mlvar", "gimme",
                                    "idio",  "rqa",  "rn",   "simulate"};
  static const char* kDescriptions[] = {
      "exact pmf, MIRT bridge, recoding, Gibbs sampling, pseudo-likelihood fit",
      "partial correlation network of a covariance or dataset",
      "one person's temporal + contemporaneous networks",
      "multilevel VAR: temporal, contemporaneous and between-person networks",
      "group iterative model search over unified SEMs",
      "encompassing idiographic network model",
      "recurrence plot and quantification",
      "recurrence network metrics",
      "simulate datasets from a gVAR or Ising model"};
  for (std::size_t i = 0; i < sizeof(kCommands) / sizeof(kCommands[0]); ++i)
    app.add_subcommand(kCommands[i], kDescriptions[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(Errc::invalid_argument, e.what());
  }

  try {
    RunContext ctx;
    ctx.command = app.get_subcommands().front()->get_name();

    const std::string config_text = read_text_file(config_path);
    ctx.config_checksum = checksum_hex(config_text);
    json cfg;
    try {
      cfg = json::parse(config_text);
    } catch (const json::exception& e) {
      fail(Errc::io_error, std::string("cannot parse config: ") + e.what());
    }
    check_keys(cfg, "config",
               {"seed", "output_dir", "input", "preprocess", "ising", "ggm", "gvar",
                "mlvar", "gimme", "idio", "rqa", "rn", "simulate"});
    if (app.count("--seed")) cfg["seed"] = seed;
    if (app.count("--output-dir")) cfg["output_dir"] = output_dir;

    const json* seed_key = find_key(cfg, "seed");
    if (seed_key && !seed_key->is_number_unsigned())
      fail(Errc::invalid_argument, "'config.seed' must be a nonnegative integer");
    ctx.seed = seed_key ? seed_key->get<std::uint64_t>() : 1;
    ctx.config = cfg;
    ctx.output_dir = str_or(cfg, "output_dir", "out", "config");

    std::error_code ec;
    fs::create_directories(ctx.output_dir, ec);
    if (ec)
      fail(Errc::io_error,
           "cannot create output directory '" + ctx.output_dir.string() + "'");

    dispatch(ctx.command, cfg, ctx);
    write_manifest(ctx);
    return 0;
  } catch (const Error& e) {
    return report_error(e.code(), e.what());
  } catch (const std::exception& e) {
    json err{{"error", {{"code", "Internal"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
}

}  // namespace netpsy
