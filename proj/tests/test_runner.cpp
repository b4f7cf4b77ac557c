#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "mpskernel/csv.hpp"
#include "mpskernel/pqc.hpp"
#include "mpskernel/regression.hpp"
#include "mpskernel/runner.hpp"
#include "test_support.hpp"

using namespace mpsk;
using nlohmann::json;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mpskernel_runner_" + std::to_string(::getpid()) + "_" + name + "_" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

json load(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

json minimal_kernel_eval() {
  return json::parse(R"({
    "task": "kernel-eval",
    "lattice": [{"integer_M": 1}, {"integer_M": 1}],
    "weighting": {"type": "uniform"},
    "params": {"x": [0.2, -0.7], "x_prime": [0.2, -0.7]}
  })");
}

std::filesystem::path write_training_csv(const std::filesystem::path& dir) {
  const auto lattice = support::integer_lattice({1, 1});
  const auto target = support::random_half_lattice_target(lattice, 3);
  std::mt19937_64 rng(4);
  const auto data = support::sample_dataset(target, 25, 2, rng);
  const auto path = dir / "train.csv";
  write_dataset_csv(path, data);
  return path;
}

}  // namespace

TEST_CASE("validate_config diagnostics") {
  CHECK(validate_config(minimal_kernel_eval()).empty());

  json missing_data = json::parse(R"({
    "task": "krr",
    "lattice": [{"integer_M": 1}],
    "params": {"lambda": 0.1}
  })");
  const auto diags = validate_config(missing_data);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].find("train_csv") != std::string::npos);

  json bad_s = json::parse(R"({
    "task": "rff",
    "lattice": [{"integer_M": 1}],
    "params": {"train_csv": "t.csv", "S": 0}
  })");
  bool found = false;
  for (const auto& d : validate_config(bad_s)) found = found || d.find("params.S") == 0;
  CHECK(found);

  json unknown = json::parse(R"({"task": "frobnicate"})");
  CHECK_FALSE(validate_config(unknown).empty());

  json zero_weighting = minimal_kernel_eval();
  zero_weighting["weighting"] = {{"type", "product"},
                                 {"vectors", {{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}}};
  CHECK_FALSE(validate_config(zero_weighting).empty());

  json no_lattice = json::parse(R"({"task": "gram", "params": {"points_csv": "p.csv"}})");
  bool lattice_diag = false;
  for (const auto& d : validate_config(no_lattice))
    lattice_diag = lattice_diag || d.find("lattice") == 0;
  CHECK(lattice_diag);
}

TEST_CASE("kernel-eval at a coincident pair reports exactly one") {
  const auto out = fresh_dir("kernel_eval");
  RunOptions options;
  options.out_dir = out;
  CHECK(run_config(minimal_kernel_eval(), options) == kExitOk);

  const auto report = load(out / "kernel-eval.json");
  CHECK(report.at("results").at("values")[0].get<double>() == 1.0);
  CHECK(report.at("version").get<std::string>().find("mpskernel") == 0);
  CHECK(report.at("config").at("task") == "kernel-eval");
  CHECK(report.contains("timing"));
  CHECK(std::filesystem::exists(out / "kernel_values.csv"));
}

TEST_CASE("invalid configs exit with the config code and run nothing") {
  const auto out = fresh_dir("invalid");
  RunOptions options;
  options.out_dir = out;
  CHECK(run_config(json::parse(R"({"task": "frobnicate"})"), options) == kExitConfigError);
  CHECK_FALSE(std::filesystem::exists(out / "frobnicate.json"));
}

TEST_CASE("numeric failures exit with the numeric code") {
  const auto out = fresh_dir("numeric");
  RunOptions options;
  options.out_dir = out;
  json config = json::parse(R"({
    "task": "krr",
    "lattice": [{"integer_M": 1}],
    "params": {"train_csv": "/nonexistent/train.csv", "lambda": 0.1}
  })");
  CHECK(run_config(config, options) == kExitNumericError);
}

TEST_CASE("same config and seeds give byte-identical artifacts modulo timing") {
  const auto data_dir = fresh_dir("determinism_data");
  const auto train = write_training_csv(data_dir);

  json config = json::parse(R"({
    "task": "rff",
    "lattice": [{"integer_M": 1}, {"integer_M": 1}],
    "weighting": {"type": "random", "bond": 2, "seed": 11},
    "params": {"lambda": 0.001, "S": 64, "seed": 5}
  })");
  config["params"]["train_csv"] = train.string();
  config["params"]["queries_csv"] = train.string();

  const auto out_a = fresh_dir("determinism_a");
  const auto out_b = fresh_dir("determinism_b");
  RunOptions options;
  options.out_dir = out_a;
  REQUIRE(run_config(config, options) == kExitOk);
  options.out_dir = out_b;
  REQUIRE(run_config(config, options) == kExitOk);

  auto report_a = load(out_a / "rff.json");
  auto report_b = load(out_b / "rff.json");
  report_a.erase("timing");
  report_b.erase("timing");
  CHECK(report_a == report_b);
  CHECK(slurp(out_a / "predictions.csv") == slurp(out_b / "predictions.csv"));
  CHECK(slurp(out_a / "model_rff.json") == slurp(out_b / "model_rff.json"));
}

TEST_CASE("seed override replaces the task seed") {
  const auto lattice_dir = fresh_dir("seed_override");
  json config = json::parse(R"({
    "task": "sample",
    "lattice": [{"integer_M": 1}],
    "weighting": {"type": "uniform"},
    "params": {"count": 40, "seed": 1}
  })");

  RunOptions options;
  options.out_dir = lattice_dir / "a";
  REQUIRE(run_config(config, options) == kExitOk);
  options.out_dir = lattice_dir / "b";
  options.seed_override = 999;
  REQUIRE(run_config(config, options) == kExitOk);

  const auto report_b = load(lattice_dir / "b" / "sample.json");
  CHECK(report_b.at("config").at("params").at("seed").get<int>() == 999);
  CHECK(slurp(lattice_dir / "a" / "samples.csv") != slurp(lattice_dir / "b" / "samples.csv"));

  const auto table = read_csv(lattice_dir / "a" / "samples.csv");
  CHECK(table.values.rows() == 40);
  CHECK(table.header == std::vector<std::string>{"k_1", "w_1"});
}

TEST_CASE("kernel-eval consumes query pairs from CSV") {
  const auto dir = fresh_dir("pairs_csv");
  const auto lattice = support::integer_lattice({1, 1});
  const auto engine = new_engine(lattice, uniform_mps(lattice));

  std::mt19937_64 rng(44);
  Eigen::MatrixXd pairs(6, 4);
  for (int i = 0; i < 6; ++i) {
    pairs.row(i).head(2) = support::random_point(rng, 2).transpose();
    pairs.row(i).tail(2) = support::random_point(rng, 2).transpose();
  }
  write_csv(dir / "pairs.csv", {"x_1", "x_2", "xp_1", "xp_2"}, pairs);

  json config = json::parse(R"({
    "task": "kernel-eval",
    "lattice": [{"integer_M": 1}, {"integer_M": 1}],
    "params": {}
  })");
  config["params"]["pairs_csv"] = (dir / "pairs.csv").string();
  RunOptions options;
  options.out_dir = dir;
  REQUIRE(run_config(config, options) == kExitOk);

  const auto table = read_csv(dir / "kernel_values.csv");
  REQUIRE(table.values.rows() == 6);
  for (int i = 0; i < 6; ++i) {
    const Eigen::VectorXd x = pairs.row(i).head(2).transpose();
    const Eigen::VectorXd xp = pairs.row(i).tail(2).transpose();
    CHECK(table.values(i, 4) == doctest::Approx(eval_kernel(engine, x, xp)).epsilon(1e-14));
  }
}

TEST_CASE("engines built from an MPS file match the in-process weighting") {
  const auto dir = fresh_dir("mps_file");
  const auto lattice = support::integer_lattice({1, 1});
  const auto weights = random_mps(lattice, 2, 321);
  const auto mps_path = dir / "weighting.json";
  {
    std::ofstream out(mps_path);
    out << mps_to_json(weights).dump(2);
  }

  json config = json::parse(R"({
    "task": "kernel-eval",
    "lattice": [{"integer_M": 1}, {"integer_M": 1}],
    "params": {"x": [0.6, -0.9], "x_prime": [-1.3, 0.25]}
  })");
  config["weighting"] = {{"type", "mps_file"}, {"path", mps_path.string()}};
  RunOptions options;
  options.out_dir = dir;
  REQUIRE(run_config(config, options) == kExitOk);

  const auto engine = new_engine(lattice, weights);
  Eigen::VectorXd x(2), xp(2);
  x << 0.6, -0.9;
  xp << -1.3, 0.25;
  const auto report = load(dir / "kernel-eval.json");
  CHECK(report.at("results").at("values")[0].get<double>() ==
        doctest::Approx(eval_kernel(engine, x, xp)).epsilon(1e-14));
}

TEST_CASE("gram task writes a square unit-diagonal matrix") {
  const auto dir = fresh_dir("gram");
  const auto train = write_training_csv(dir);
  json config = json::parse(R"({
    "task": "gram",
    "lattice": [{"integer_M": 1}, {"integer_M": 1}],
    "weighting": {"type": "uniform"},
    "params": {}
  })");
  config["params"]["points_csv"] = train.string();
  RunOptions options;
  options.out_dir = dir;
  options.threads = 3;
  REQUIRE(run_config(config, options) == kExitOk);
  const auto table = read_csv(dir / "gram.csv");
  REQUIRE(table.values.rows() == table.values.cols());
  for (Eigen::Index i = 0; i < table.values.rows(); ++i)
    CHECK(table.values(i, i) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("verify task passes on the default sweep") {
  const auto dir = fresh_dir("verify");
  json config = json::parse(R"({"task": "verify", "params": {"seed": 3}})");
  RunOptions options;
  options.out_dir = dir;
  CHECK(run_config(config, options) == kExitOk);
  const auto report = load(dir / "verify.json");
  CHECK(report.at("results").at("pass").get<bool>());
  CHECK(report.at("results").at("max_oracle_error").get<double>() <= 1e-9);
}

TEST_CASE("pqc-check task writes residual and coefficients") {
  const auto dir = fresh_dir("pqc");
  const auto circuit_path = dir / "circuit.json";
  {
    std::ofstream out(circuit_path);
    out << circuit_to_json(support::cosine_circuit()).dump(2);
  }
  json config = json::parse(R"({"task": "pqc-check", "params": {"seed": 2}})");
  config["params"]["circuit"] = circuit_path.string();
  RunOptions options;
  options.out_dir = dir;
  REQUIRE(run_config(config, options) == kExitOk);
  const auto report = load(dir / "pqc-check.json");
  CHECK(report.at("results").at("residual").get<double>() <= 1e-8);
  CHECK(report.at("results").at("conjugacy_max_error").get<double>() <= 1e-10);
  const auto table = read_csv(dir / "coefficients.csv");
  CHECK(table.values.rows() == 3);
}

TEST_CASE("bench task emits one row per dimension") {
  const auto dir = fresh_dir("bench");
  json config = json::parse(R"({
    "task": "bench",
    "params": {"dims": [2, 4], "bond": 2, "M": 1, "reps": 3, "seed": 1}
  })");
  RunOptions options;
  options.out_dir = dir;
  REQUIRE(run_config(config, options) == kExitOk);
  const auto table = read_csv(dir / "bench.csv");
  CHECK(table.values.rows() == 2);
  CHECK(table.values(0, 0) == 2.0);
  CHECK(table.values(1, 0) == 4.0);
  CHECK(table.values.col(4).minCoeff() >= 0.0);
}
