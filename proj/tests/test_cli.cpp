#include <doctest.h>

#include <sys/wait.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netpsy/dataset.hpp"
#include "netpsy/io.hpp"
#include "netpsy/ising.hpp"
#include "netpsy/rng.hpp"
#include "netpsy/var.hpp"
#include "util.hpp"

using namespace netpsy;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

const fs::path& cli_dir() {
  static const fs::path dir = netpsy::test::fresh_dir("cli");
  return dir;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the installed binary with the given arguments, capturing both
// streams. The test binary and the CLI under test share a filesystem, so
// plain redirection is enough.
RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_file = cli_dir() / ("stdout_" + std::to_string(counter));
  const fs::path err_file = cli_dir() / ("stderr_" + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string(NETPSY_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(out_file.string());
  r.err = read_text_file(err_file.string());
  return r;
}

std::string write_config(const std::string& name, const json& cfg) {
  const std::string path = (cli_dir() / name).string();
  write_text_file(path, cfg.dump(2) + "\n");
  return path;
}

std::string subdir(const std::string& name) {
  const fs::path dir = cli_dir() / name;
  fs::create_directories(dir);
  return dir.string();
}

// A small gVAR dataset written as an ILD CSV, the input format of the
// data-driven commands.
std::string write_gvar_dataset(const std::string& name, int persons, int t,
                               std::uint64_t seed) {
  VarModel truth;
  truth.b = Eigen::MatrixXd::Zero(3, 3);
  truth.b(0, 0) = 0.4;
  truth.b(1, 0) = 0.3;
  truth.theta = Eigen::MatrixXd::Identity(3, 3);
  truth.theta(0, 1) = truth.theta(1, 0) = 0.3;
  truth.intercept = Eigen::VectorXd::Zero(3);

  IldDataset data;
  data.item_names = {"calm", "sad", "tense"};
  data.beeps_per_day = t;
  for (int k = 0; k < persons; ++k) {
    PersonSeries person;
    person.id = "p" + std::to_string(k + 1);
    Rng rng(derive_seed(seed, person.id));
    VarModel shifted = truth;
    for (int j = 0; j < 3; ++j)
      shifted.intercept(j) += 0.8 * rng.normal();
    person.values = simulate_gvar(shifted, t, rng);
    for (int r = 0; r < t; ++r) {
      person.day.push_back(1);
      person.beep.push_back(r + 1);
    }
    data.persons.push_back(std::move(person));
  }
  const std::string path = (cli_dir() / name).string();
  save_ild_csv(data, path);
  return path;
}

json input_block(const std::string& path) {
  return json{{"path", path}, {"items", {"calm", "sad", "tense"}}};
}

}  // namespace

TEST_CASE("cli: version, help and argument errors") {
  CHECK(run_cli("--version").exit_code == 0);

  const RunResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("netpsy") != std::string::npos);
  CHECK(help.out.find("gimme") != std::string::npos);

  // A subcommand is required, as is --config.
  CHECK(run_cli("--config nowhere.json").exit_code == 2);
  CHECK(run_cli("ggm").exit_code == 2);
  CHECK(run_cli("frobnicate --config nowhere.json").exit_code == 2);

  const RunResult absent = run_cli("ggm --config nowhere.json");
  CHECK(absent.exit_code == 2);
  CHECK(absent.err.find("IoError") != std::string::npos);
}

TEST_CASE("cli: unknown config keys are rejected with their dotted path") {
  const std::string cfg = write_config(
      "unknown_key.json", json{{"seed", 1},
                               {"output_dir", subdir("unknown_key")},
                               {"gm", json::object()}});
  const RunResult r = run_cli("ggm --config " + cfg);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("UnknownKey") != std::string::npos);
  CHECK(r.err.find("config.gm") != std::string::npos);

  const std::string nested = write_config(
      "unknown_nested.json",
      json{{"seed", 1},
           {"output_dir", subdir("unknown_nested")},
           {"ggm", {{"covariance", "x.csv"}, {"rige", 0.1}}}});
  const RunResult n = run_cli("ggm --config " + nested);
  CHECK(n.exit_code == 2);
  CHECK(n.err.find("ggm.rige") != std::string::npos);
}

TEST_CASE("cli: ising pmf and the latent-factor bridge") {
  IsingParams params;
  params.coding = Coding::PlusMinus;
  params.mu = Eigen::VectorXd::Zero(3);
  params.mu << 0.2, -0.1, 0.0;
  params.sigma = Eigen::MatrixXd::Zero(3, 3);
  params.sigma(0, 1) = params.sigma(1, 0) = 0.4;
  params.sigma(1, 2) = params.sigma(2, 1) = -0.3;
  const std::string params_path = (cli_dir() / "params.json").string();
  save_ising_params(params, params_path);

  const std::string out = subdir("ising_pmf");
  const std::string cfg = write_config(
      "ising_pmf.json",
      json{{"seed", 1},
           {"output_dir", out},
           {"ising", {{"action", "pmf"}, {"params", params_path}}}});
  REQUIRE(run_cli("ising --config " + cfg).exit_code == 0);

  // The pmf artifact sums to one and the manifest records the input.
  std::istringstream pmf_text(read_text_file(out + "/pmf.csv"));
  std::string line;
  std::getline(pmf_text, line);  // header
  double total = 0.0;
  int n_rows = 0;
  while (std::getline(pmf_text, line)) {
    if (line.empty()) continue;
    total += std::strtod(line.c_str() + line.rfind(',') + 1, nullptr);
    ++n_rows;
  }
  CHECK(n_rows == 8);
  CHECK(std::abs(total - 1.0) < 1e-12);

  const json manifest = json::parse(read_text_file(out + "/manifest.json"));
  CHECK(manifest.at("command") == "ising");
  CHECK(manifest.at("inputs").contains(params_path));
  CHECK(manifest.at("seed") == 1);

  SUBCASE("mirt action reports the bridge error") {
    const std::string mirt_out = subdir("ising_mirt");
    const std::string mirt_cfg = write_config(
        "ising_mirt.json",
        json{{"seed", 1},
             {"output_dir", mirt_out},
             {"ising", {{"action", "mirt"}, {"params", params_path}}}});
    REQUIRE(run_cli("ising --config " + mirt_cfg).exit_code == 0);
    const json mirt = json::parse(read_text_file(mirt_out + "/mirt.json"));
    CHECK(mirt.at("r").get<int>() >= 1);
    const json summary = json::parse(read_text_file(mirt_out + "/ising.json"));
    CHECK(summary.at("tv_vs_exact").get<double>() < 1e-6);
    CHECK(fs::exists(mirt_out + "/mirt_pmf.csv"));
  }
}

TEST_CASE("cli: ggm distinguishes validation from numeric failure") {
  Eigen::MatrixXd good(3, 3);
  good << 1.0, 0.3, 0.1, 0.3, 1.0, 0.2, 0.1, 0.2, 1.0;
  const std::string good_path = (cli_dir() / "cov_good.csv").string();
  write_matrix_csv(good_path, good);

  const std::string out = subdir("ggm_ok");
  const std::string cfg =
      write_config("ggm_ok.json", json{{"seed", 1},
                                       {"output_dir", out},
                                       {"ggm", {{"covariance", good_path}}}});
  REQUIRE(run_cli("ggm --config " + cfg).exit_code == 0);
  CHECK(fs::exists(out + "/ggm_network.csv"));
  CHECK(fs::exists(out + "/ggm_network.graphml"));
  CHECK(fs::exists(out + "/ggm_network.dot"));
  const json summary = json::parse(read_text_file(out + "/ggm.json"));
  CHECK(summary.at("p") == 3);
  CHECK(summary.at("saturated").is_boolean());

  // Singular input is a numeric failure: exit 3, machine-readable code.
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  const std::string bad_path = (cli_dir() / "cov_bad.csv").string();
  write_matrix_csv(bad_path, singular);
  const std::string bad_cfg = write_config(
      "ggm_bad.json", json{{"seed", 1},
                           {"output_dir", subdir("ggm_bad")},
                           {"ggm", {{"covariance", bad_path}}}});
  const RunResult r = run_cli("ggm --config " + bad_cfg);
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("NotPositiveDefinite") != std::string::npos);
  const json err = json::parse(r.err);
  CHECK(err.at("error").at("code") == "NotPositiveDefinite");
}

TEST_CASE("cli: simulate reruns are byte-identical and seeds matter") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
  b(0, 0) = 0.5;
  b(1, 0) = 0.2;
  const std::string b_path = (cli_dir() / "sim_b.csv").string();
  write_matrix_csv(b_path, b);
  const std::string theta_path = (cli_dir() / "sim_theta.csv").string();
  write_matrix_csv(theta_path, Eigen::MatrixXd::Identity(2, 2));

  const std::string out = subdir("simulate");
  const json cfg_json{{"seed", 77},
                      {"output_dir", out},
                      {"simulate",
                       {{"model", "gvar"},
                        {"b", b_path},
                        {"theta", theta_path},
                        {"t", 60},
                        {"persons", 2},
                        {"burn_in", 50}}}};
  const std::string cfg = write_config("simulate.json", cfg_json);

  REQUIRE(run_cli("simulate --config " + cfg).exit_code == 0);
  const std::string first_data = read_text_file(out + "/simulated.csv");
  const std::string first_manifest = read_text_file(out + "/manifest.json");

  REQUIRE(run_cli("simulate --config " + cfg).exit_code == 0);
  CHECK(read_text_file(out + "/simulated.csv") == first_data);
  CHECK(read_text_file(out + "/manifest.json") == first_manifest);

  // A different seed gives a different draw; the flag overrides the config.
  REQUIRE(run_cli("simulate --seed 78 --config " + cfg).exit_code == 0);
  CHECK(read_text_file(out + "/simulated.csv") != first_data);
  const json manifest = json::parse(read_text_file(out + "/manifest.json"));
  CHECK(manifest.at("seed") == 78);
  CHECK(manifest.at("config").at("seed") == 78);
}

TEST_CASE("cli: gvar on a simulated person") {
  const std::string data_path = write_gvar_dataset("gvar_data.csv", 1, 400, 5);
  const std::string out = subdir("gvar");
  const std::string cfg = write_config(
      "gvar.json", json{{"seed", 1},
                        {"output_dir", out},
                        {"input", input_block(data_path)},
                        {"gvar", {{"person", "p1"}}}});
  REQUIRE(run_cli("gvar --config " + cfg).exit_code == 0);

  const json summary = json::parse(read_text_file(out + "/gvar.json"));
  CHECK(summary.at("person") == "p1");
  CHECK(summary.at("n_lag_pairs") == 399);
  CHECK(summary.at("stable").get<bool>());
  CHECK(summary.at("density").at("temporal").get<double>() > 0.0);

  const Eigen::MatrixXd b_hat = read_matrix_csv(out + "/gvar_temporal.csv");
  REQUIRE(b_hat.rows() == 3);
  CHECK(std::abs(b_hat(0, 0) - 0.4) < 0.2);
  CHECK(std::abs(b_hat(1, 0) - 0.3) < 0.2);
  CHECK(fs::exists(out + "/gvar_contemporaneous.graphml"));
  CHECK(fs::exists(out + "/gvar_theta.csv"));
}

TEST_CASE("cli: mlvar produces the three-network panel") {
  const std::string data_path = write_gvar_dataset("mlvar_data.csv", 5, 150, 6);
  const std::string out = subdir("mlvar");
  const std::string cfg =
      write_config("mlvar.json", json{{"seed", 1},
                                      {"output_dir", out},
                                      {"input", input_block(data_path)}});
  REQUIRE(run_cli("mlvar --config " + cfg).exit_code == 0);

  CHECK(fs::exists(out + "/mlvar_temporal.csv"));
  CHECK(fs::exists(out + "/mlvar_contemporaneous.csv"));
  CHECK(fs::exists(out + "/mlvar_between.csv"));
  const json summary = json::parse(read_text_file(out + "/mlvar.json"));
  const json& overall = summary.at("overall");
  CHECK(overall.at("n_persons") == 5);
  CHECK(overall.at("failed").empty());
  CHECK(overall.at("density").contains("between"));
}

TEST_CASE("cli: gimme writes group structure and per-person networks") {
  const std::string data_path = write_gvar_dataset("gimme_data.csv", 4, 200, 7);
  const std::string out = subdir("gimme");
  const std::string cfg =
      write_config("gimme.json", json{{"seed", 1},
                                      {"output_dir", out},
                                      {"input", input_block(data_path)}});
  REQUIRE(run_cli("gimme --config " + cfg).exit_code == 0);

  const json summary = json::parse(read_text_file(out + "/gimme.json"));
  CHECK(summary.at("person_ids").size() == 4);
  CHECK(summary.at("group").contains("temporal"));
  CHECK(summary.at("fit_records").size() >= 8);
  CHECK(fs::exists(out + "/gimme_group_temporal.csv"));
  CHECK(fs::exists(out + "/gimme_person_p1_temporal.graphml"));
  CHECK(fs::exists(out + "/gimme_person_p4_contemporaneous.csv"));
}

TEST_CASE("cli: idio reports the Ising agreement of the weighted mixture") {
  Eigen::MatrixXd theta = Eigen::MatrixXd::Constant(3, 3, 0.4);
  theta.diagonal().setZero();
  const std::string theta_path = (cli_dir() / "idio_theta.csv").string();
  write_matrix_csv(theta_path, theta);

  const std::string out = subdir("idio");
  const std::string cfg = write_config(
      "idio.json",
      json{{"seed", 1},
           {"output_dir", out},
           {"idio", {{"theta", theta_path}, {"mu", {0.3, -0.2, 0.1}}}}});
  REQUIRE(run_cli("idio --config " + cfg).exit_code == 0);

  const json summary = json::parse(read_text_file(out + "/idio.json"));
  CHECK(summary.at("tv_vs_ising").get<double>() < 1e-10);
  CHECK(fs::exists(out + "/idio_pmf.csv"));
  CHECK(fs::exists(out + "/idio_sigma.csv"));
}

TEST_CASE("cli: recurrence commands quantify a sine series") {
  Eigen::MatrixXd sine(300, 1);
  for (int i = 0; i < 300; ++i)
    sine(i, 0) = std::sin(2.0 * 3.14159265358979323846 * i / 25.3);
  const std::string series_path = (cli_dir() / "sine.csv").string();
  write_matrix_csv(series_path, sine);

  // Embedding unfolds the scalar signal; an unembedded sine also recurs at
  // mirrored phase, which produces point-like recurrences and a low DET.
  const std::string out = subdir("rqa");
  const std::string cfg = write_config(
      "rqa.json", json{{"seed", 1},
                       {"output_dir", out},
                       {"rqa",
                        {{"series", series_path},
                         {"target_rr", 0.1},
                         {"embedding_dim", 2},
                         {"delay", 6}}}});
  REQUIRE(run_cli("rqa --config " + cfg).exit_code == 0);

  const json summary = json::parse(read_text_file(out + "/rqa.json"));
  CHECK(std::abs(summary.at("rr").get<double>() - 0.1) < 1e-3);
  CHECK(summary.at("det").get<double>() > 0.9);
  CHECK(summary.at("epsilon_source") == "target-rr");
  CHECK(read_text_file(out + "/rp.pbm").rfind("P1\n", 0) == 0);

  SUBCASE("epsilon and target_rr are mutually exclusive") {
    const std::string bad = write_config(
        "rqa_bad.json",
        json{{"seed", 1},
             {"output_dir", subdir("rqa_bad")},
             {"rqa",
              {{"series", series_path}, {"target_rr", 0.1}, {"epsilon", 0.2}}}});
    const RunResult r = run_cli("rqa --config " + bad);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("InvalidArgument") != std::string::npos);
  }

  SUBCASE("recurrence network metrics of the same series") {
    const std::string rn_out = subdir("rn");
    const std::string rn_cfg = write_config(
        "rn.json", json{{"seed", 1},
                        {"output_dir", rn_out},
                        {"rn", {{"series", series_path}, {"target_rr", 0.1}}}});
    REQUIRE(run_cli("rn --config " + rn_cfg).exit_code == 0);
    const json rn = json::parse(read_text_file(rn_out + "/rn.json"));
    CHECK(rn.at("n_nodes") == 300);
    CHECK(rn.at("n_edges").get<long>() > 0);
    CHECK(fs::exists(rn_out + "/rn.graphml"));
  }
}
