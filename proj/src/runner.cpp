#include "mpskernel/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

#include "mpskernel/csv.hpp"
#include "mpskernel/kernel_engine.hpp"
#include "mpskernel/lattice.hpp"
#include "mpskernel/pqc.hpp"
#include "mpskernel/regression.hpp"
#include "mpskernel/version.hpp"
#include "mpskernel/weight_mps.hpp"

namespace mpsk {

namespace {

using nlohmann::json;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

const std::set<std::string>& known_tasks() {
  static const std::set<std::string> tasks = {"kernel-eval", "gram", "krr",   "rff",
                                              "sample",      "verify", "bench", "pqc-check"};
  return tasks;
}

bool task_needs_lattice(const std::string& task) {
  // bench builds its own integer lattices from params.dims and params.M;
  // pqc-check can fall back to the circuit's induced lattice.
  return task != "verify" && task != "pqc-check" && task != "bench";
}

bool product_weighting_is_zero(const json& weighting) {
  if (!weighting.contains("vectors") || !weighting.at("vectors").is_array()) return false;
  for (const auto& axis : weighting.at("vectors")) {
    if (!axis.is_array() || axis.empty()) continue;
    bool all_zero = true;
    for (const auto& v : axis) {
      if (!v.is_number() || v.get<double>() != 0.0) all_zero = false;
    }
    if (all_zero) return true;
  }
  return false;
}

json resolve_config(const json& config, const RunOptions& options) {
  json resolved = config;
  const std::string task = resolved.value("task", "");
  if (!resolved.contains("weighting")) resolved["weighting"] = {{"type", "uniform"}};
  json& params = resolved["params"];
  if (!params.is_object()) params = json::object();
  if (!params.contains("seed")) params["seed"] = 0;
  if (options.seed_override) params["seed"] = *options.seed_override;
  if (task == "krr" || task == "rff") {
    if (!params.contains("lambda")) params["lambda"] = 0.0;
  }
  if (task == "bench") {
    if (!params.contains("bond")) params["bond"] = 4;
    if (!params.contains("M")) params["M"] = 1;
    if (!params.contains("reps")) params["reps"] = 20;
  }
  if (task == "pqc-check") {
    if (!params.contains("sample_count")) params["sample_count"] = 0;
  }
  return resolved;
}

WeightMPS resolve_weighting(const json& weighting, const FrequencyLattice& lattice) {
  const std::string type = weighting.value("type", "uniform");
  if (type == "uniform") return uniform_mps(lattice);
  if (type == "product")
    return product_weights(lattice,
                           weighting.at("vectors").get<std::vector<std::vector<double>>>());
  if (type == "random")
    return random_mps(lattice, weighting.at("bond").get<int>(),
                      weighting.at("seed").get<std::uint64_t>());
  if (type == "mps_file") {
    WeightMPS mps = mps_from_json(
        load_json_file(weighting.at("path").get<std::filesystem::path>()));
    check_compatible(mps, lattice);
    return mps;
  }
  throw std::invalid_argument("weighting: unknown type '" + type + "'");
}

json new_report(const json& resolved, const RunOptions& options) {
  json report;
  report["version"] = std::string(kToolName) + " " + kToolVersion;
  report["config"] = resolved;
  report["threads"] = options.threads;
  report["results"] = json::object();
  report["timing"] = json::object();
  report["artifacts"] = json::array();
  return report;
}

std::vector<std::string> point_header(int d, const std::string& prefix) {
  std::vector<std::string> header;
  for (int j = 1; j <= d; ++j) header.push_back(prefix + "_" + std::to_string(j));
  return header;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> box(-M_PI, M_PI);
  Eigen::VectorXd x(d);
  for (int j = 0; j < d; ++j) x(j) = box(rng);
  return x;
}

// ---------------------------------------------------------------- tasks ---

void run_kernel_eval(const json& resolved, const RunOptions& options, json& report) {
  const auto lattice = build_lattice(encoding_from_json(resolved.at("lattice")));
  const auto engine = new_engine(lattice, resolve_weighting(resolved.at("weighting"), lattice));
  const int d = lattice.dim();
  const json& params = resolved.at("params");

  Eigen::MatrixXd pairs;
  if (params.contains("x")) {
    const auto x = params.at("x").get<std::vector<double>>();
    const auto xp = params.at("x_prime").get<std::vector<double>>();
    pairs.resize(1, 2 * d);
    for (int j = 0; j < d; ++j) {
      pairs(0, j) = x[static_cast<std::size_t>(j)];
      pairs(0, d + j) = xp[static_cast<std::size_t>(j)];
    }
  } else {
    const CsvTable table = read_csv(params.at("pairs_csv").get<std::filesystem::path>());
    std::vector<std::string> expected = point_header(d, "x");
    const auto xp_names = point_header(d, "xp");
    expected.insert(expected.end(), xp_names.begin(), xp_names.end());
    if (table.header != expected)
      throw std::runtime_error("kernel-eval: pairs CSV header must be x_1..x_d,xp_1..xp_d");
    pairs = table.values;
  }

  Stopwatch watch;
  Eigen::MatrixXd out(pairs.rows(), 2 * d + 1);
  for (Eigen::Index i = 0; i < pairs.rows(); ++i) {
    const Eigen::VectorXd x = pairs.row(i).head(d).transpose();
    const Eigen::VectorXd xp = pairs.row(i).tail(d).transpose();
    out.row(i).head(2 * d) = pairs.row(i);
    out(i, 2 * d) = eval_kernel(engine, x, xp);
  }
  report["timing"]["eval_seconds"] = watch.seconds();

  std::vector<std::string> header = point_header(d, "x");
  const auto xp_names = point_header(d, "xp");
  header.insert(header.end(), xp_names.begin(), xp_names.end());
  header.emplace_back("k");
  write_csv(options.out_dir / "kernel_values.csv", header, out);
  report["artifacts"].push_back("kernel_values.csv");

  report["results"]["count"] = out.rows();
  if (out.rows() <= 100) {
    std::vector<double> values;
    for (Eigen::Index i = 0; i < out.rows(); ++i) values.push_back(out(i, 2 * d));
    report["results"]["values"] = values;
  }
}

void run_gram(const json& resolved, const RunOptions& options, json& report) {
  const auto lattice = build_lattice(encoding_from_json(resolved.at("lattice")));
  const auto engine = new_engine(lattice, resolve_weighting(resolved.at("weighting"), lattice));
  const auto points =
      read_points_csv(resolved.at("params").at("points_csv").get<std::filesystem::path>());
  if (points.cols() != lattice.dim())
    throw std::runtime_error("gram: point dimension does not match lattice");

  Stopwatch watch;
  const Eigen::MatrixXd g = gram(engine, points, points, options.threads);
  report["timing"]["gram_seconds"] = watch.seconds();

  write_csv(options.out_dir / "gram.csv", point_header(static_cast<int>(g.cols()), "k"), g);
  report["artifacts"].push_back("gram.csv");
  report["results"]["rows"] = g.rows();
  report["results"]["cols"] = g.cols();
}

void run_sample(const json& resolved, const RunOptions& options, json& report) {
  const auto lattice = build_lattice(encoding_from_json(resolved.at("lattice")));
  const auto weights = resolve_weighting(resolved.at("weighting"), lattice);
  const json& params = resolved.at("params");
  const auto count = params.at("count").get<std::size_t>();
  const auto seed = params.at("seed").get<std::uint64_t>();

  Stopwatch watch;
  std::mt19937_64 rng(seed);
  const auto indices = sample_indices(weights, rng, count);
  report["timing"]["sample_seconds"] = watch.seconds();

  const int d = lattice.dim();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(count), 2 * d);
  for (std::size_t i = 0; i < count; ++i) {
    const auto freq = frequency_of(lattice, indices[i]);
    for (int j = 0; j < d; ++j) {
      rows(static_cast<Eigen::Index>(i), j) = indices[i][static_cast<std::size_t>(j)];
      rows(static_cast<Eigen::Index>(i), d + j) = freq[static_cast<std::size_t>(j)];
    }
  }
  std::vector<std::string> header = point_header(d, "k");
  const auto w_names = point_header(d, "w");
  header.insert(header.end(), w_names.begin(), w_names.end());
  write_csv(options.out_dir / "samples.csv", header, rows);
  report["artifacts"].push_back("samples.csv");
  report["results"]["count"] = count;
  report["results"]["seed"] = seed;
}

void run_krr(const json& resolved, const RunOptions& options, json& report) {
  const auto lattice = build_lattice(encoding_from_json(resolved.at("lattice")));
  const auto engine = new_engine(lattice, resolve_weighting(resolved.at("weighting"), lattice));
  const json& params = resolved.at("params");
  const auto data = read_dataset_csv(params.at("train_csv").get<std::filesystem::path>());
  const double lambda = params.at("lambda").get<double>();

  Stopwatch fit_watch;
  const KRRModel model = krr_fit(engine, data, lambda, options.threads);
  const double fit_seconds = fit_watch.seconds();
  report["timing"]["fit_seconds"] = fit_seconds;

  const Eigen::VectorXd train_pred = krr_predict(model, engine, data.X, options.threads);
  const double train_residual =
      (train_pred + lambda * model.alpha - data.y).cwiseAbs().maxCoeff();
  report["results"]["n"] = data.X.rows();
  report["results"]["lambda"] = lambda;
  report["results"]["train_residual_inf"] = train_residual;

  double predict_seconds = 0.0;
  if (params.contains("test_csv")) {
    const auto test = read_dataset_csv(params.at("test_csv").get<std::filesystem::path>());
    Stopwatch predict_watch;
    const Eigen::VectorXd pred = krr_predict(model, engine, test.X, options.threads);
    predict_seconds += predict_watch.seconds();
    report["results"]["test_mse"] = (pred - test.y).squaredNorm() / test.y.size();
  }
  if (params.contains("queries_csv")) {
    const auto queries =
        read_points_csv(params.at("queries_csv").get<std::filesystem::path>());
    Stopwatch predict_watch;
    const Eigen::VectorXd pred = krr_predict(model, engine, queries, options.threads);
    predict_seconds += predict_watch.seconds();
    Eigen::MatrixXd rows(queries.rows(), queries.cols() + 1);
    rows << queries, pred;
    auto header = point_header(lattice.dim(), "x");
    header.emplace_back("yhat");
    write_csv(options.out_dir / "predictions.csv", header, rows);
    report["artifacts"].push_back("predictions.csv");
  }
  report["timing"]["predict_seconds"] = predict_seconds;

  write_json_file(options.out_dir / "model_krr.json", krr_to_json(model));
  report["artifacts"].push_back("model_krr.json");
  if (params.contains("S")) {
    json cost = cost_report_to_json(
        cost_report(static_cast<std::size_t>(data.X.rows()), params.at("S").get<std::size_t>(),
                    "krr", fit_seconds, predict_seconds));
    report["timing"]["cost_measured"] = cost.at("measured");
    cost.erase("measured");  // timings stay in the timing section
    report["results"]["cost"] = std::move(cost);
  }
}

void run_rff(const json& resolved, const RunOptions& options, json& report) {
  const auto lattice = build_lattice(encoding_from_json(resolved.at("lattice")));
  const auto weights = resolve_weighting(resolved.at("weighting"), lattice);
  const json& params = resolved.at("params");
  const auto data = read_dataset_csv(params.at("train_csv").get<std::filesystem::path>());
  const double lambda = params.at("lambda").get<double>();
  const int sample_count = params.at("S").get<int>();
  const auto seed = params.at("seed").get<std::uint64_t>();

  Stopwatch fit_watch;
  const RFFModel model = rff_fit(lattice, weights, data, sample_count, lambda, seed);
  const double fit_seconds = fit_watch.seconds();
  report["timing"]["fit_seconds"] = fit_seconds;

  report["results"]["n"] = data.X.rows();
  report["results"]["S"] = sample_count;
  report["results"]["lambda"] = lambda;
  report["results"]["seed"] = seed;

  double predict_seconds = 0.0;
  if (params.contains("test_csv")) {
    const auto test = read_dataset_csv(params.at("test_csv").get<std::filesystem::path>());
    Stopwatch predict_watch;
    const Eigen::VectorXd pred = rff_predict(model, test.X);
    predict_seconds += predict_watch.seconds();
    report["results"]["test_mse"] = (pred - test.y).squaredNorm() / test.y.size();
  }
  if (params.contains("queries_csv")) {
    const auto queries =
        read_points_csv(params.at("queries_csv").get<std::filesystem::path>());
    Stopwatch predict_watch;
    const Eigen::VectorXd pred = rff_predict(model, queries);
    predict_seconds += predict_watch.seconds();
    Eigen::MatrixXd rows(queries.rows(), queries.cols() + 1);
    rows << queries, pred;
    auto header = point_header(lattice.dim(), "x");
    header.emplace_back("yhat");
    write_csv(options.out_dir / "predictions.csv", header, rows);
    report["artifacts"].push_back("predictions.csv");
  }
  report["timing"]["predict_seconds"] = predict_seconds;

  write_json_file(options.out_dir / "model_rff.json", rff_to_json(model));
  report["artifacts"].push_back("model_rff.json");
  json cost = cost_report_to_json(
      cost_report(static_cast<std::size_t>(data.X.rows()),
                  static_cast<std::size_t>(sample_count), "rff", fit_seconds,
                  predict_seconds));
  report["timing"]["cost_measured"] = cost.at("measured");
  cost.erase("measured");  // timings stay in the timing section
  report["results"]["cost"] = std::move(cost);
}

void run_verify(const json& resolved, const RunOptions& options, json& report, int& exit_code) {
  const auto seed = resolved.at("params").at("seed").get<std::uint64_t>();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_m(1, 2);

  double max_oracle = 0, max_etk = 0, max_unit = 0, max_shift = 0, max_sym = 0, max_norm = 0;
  int configs = 0;
  for (int d = 1; d <= 4; ++d) {
    for (int bond = 1; bond <= 3; ++bond) {
      FrequencyLattice lattice;
      for (int j = 0; j < d; ++j) lattice.axes.push_back(axis_integer(pick_m(rng)));
      const auto weights = random_mps(lattice, bond, rng());
      const auto engine = new_engine(lattice, weights);
      ++configs;

      const auto half = half_lattice(lattice);
      const auto ws = symmetrize(weights);
      double half_norm2 = 0;
      for (const auto& idx : half) {
        const double w = eval_weight(ws, idx);
        half_norm2 += w * w;
      }
      max_norm = std::max(max_norm, std::abs(engine.norm2 - 2.0 * half_norm2));

      for (int pair = 0; pair < 10; ++pair) {
        const auto x = random_point(rng, d);
        const auto xp = random_point(rng, d);
        const auto delta = random_point(rng, d);
        const double exact = eval_kernel(engine, x, xp);
        max_oracle = std::max(max_oracle, std::abs(exact - dense_kernel(lattice, weights, x, xp)));
        max_etk = std::max(max_etk, std::abs(exact - eval_kernel_etk(engine, x, xp)));
        max_unit = std::max(max_unit, std::abs(eval_kernel(engine, x, x) - 1.0));
        max_shift = std::max(max_shift,
                             std::abs(eval_kernel(engine, x + delta, xp + delta) - exact));
        max_sym = std::max(max_sym, std::abs(eval_kernel(engine, xp, x) - exact));
      }
    }
  }

  const bool pass = max_oracle <= 1e-9 && max_etk <= 1e-9 && max_unit <= 1e-9 &&
                    max_shift <= 1e-9 && max_sym <= 1e-12 && max_norm <= 1e-9;
  report["results"] = {{"configs", configs},
                       {"max_oracle_error", max_oracle},
                       {"max_etk_error", max_etk},
                       {"max_unit_diagonal_error", max_unit},
                       {"max_shift_error", max_shift},
                       {"max_symmetry_error", max_sym},
                       {"max_norm_identity_error", max_norm},
                       {"pass", pass}};
  (void)options;
  if (!pass) exit_code = kExitNumericError;
}

void run_bench(const json& resolved, const RunOptions& options, json& report) {
  const json& params = resolved.at("params");
  const auto dims = params.at("dims").get<std::vector<int>>();
  const int bond = params.at("bond").get<int>();
  const int m = params.at("M").get<int>();
  const int reps = params.at("reps").get<int>();
  const auto seed = params.at("seed").get<std::uint64_t>();

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(dims.size()), 6);
  std::vector<double> per_eval(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const int d = dims[i];
    FrequencyLattice lattice;
    for (int j = 0; j < d; ++j) lattice.axes.push_back(axis_integer(m));
    std::mt19937_64 rng(seed + i);
    const auto engine = new_engine(lattice, random_mps(lattice, bond, rng()));
    const auto x = random_point(rng, d);
    const auto xp = random_point(rng, d);
    double sink = 0.0;
    for (int warm = 0; warm < 3; ++warm) sink += eval_kernel(engine, x, xp);
    Stopwatch watch;
    for (int rep = 0; rep < reps; ++rep) sink += eval_kernel(engine, x, xp);
    const double total = watch.seconds();
    report["results"]["eval_checksum"] = sink;  // keeps the loop live, deterministic
    per_eval[i] = total / reps;
    rows(static_cast<Eigen::Index>(i), 0) = d;
    rows(static_cast<Eigen::Index>(i), 1) = bond;
    rows(static_cast<Eigen::Index>(i), 2) = m;
    rows(static_cast<Eigen::Index>(i), 3) = reps;
    rows(static_cast<Eigen::Index>(i), 4) = total;
    rows(static_cast<Eigen::Index>(i), 5) = per_eval[i];
  }
  write_csv(options.out_dir / "bench.csv",
            {"d", "bond", "M", "reps", "total_seconds", "seconds_per_eval"}, rows);
  report["artifacts"].push_back("bench.csv");

  std::vector<double> ratios;
  for (std::size_t i = 1; i < per_eval.size(); ++i)
    ratios.push_back(per_eval[i] / per_eval[i - 1]);
  report["results"]["dims"] = dims;
  report["results"]["seconds_per_eval"] = per_eval;
  report["results"]["consecutive_ratios"] = ratios;
}

void run_pqc_check(const json& resolved, const RunOptions& options, json& report) {
  const json& params = resolved.at("params");
  const auto circuit =
      circuit_from_json(load_json_file(params.at("circuit").get<std::filesystem::path>()));
  const FrequencyLattice lattice =
      resolved.contains("lattice")
          ? build_lattice(encoding_from_json(resolved.at("lattice")))
          : induced_lattice(circuit);
  const auto seed = params.at("seed").get<std::uint64_t>();
  const auto sample_count = params.at("sample_count").get<std::size_t>();

  Stopwatch watch;
  const FourierFit fit = fourier_fit(circuit, lattice, sample_count, seed);
  report["timing"]["fit_seconds"] = watch.seconds();

  double conjugacy = 0.0;
  for (std::size_t i = 0; i < fit.indices.size(); ++i) {
    const auto mirror = lattice_linear_index(lattice, negated(fit.indices[i]));
    conjugacy = std::max(conjugacy,
                         std::abs(fit.coefficients(static_cast<Eigen::Index>(i)) -
                                  std::conj(fit.coefficients(static_cast<Eigen::Index>(mirror)))));
  }

  const int d = lattice.dim();
  Eigen::MatrixXd rows(fit.coefficients.size(), d + 2);
  for (std::size_t i = 0; i < fit.indices.size(); ++i) {
    for (int j = 0; j < d; ++j)
      rows(static_cast<Eigen::Index>(i), j) = fit.indices[i][static_cast<std::size_t>(j)];
    rows(static_cast<Eigen::Index>(i), d) = fit.coefficients(static_cast<Eigen::Index>(i)).real();
    rows(static_cast<Eigen::Index>(i), d + 1) =
        fit.coefficients(static_cast<Eigen::Index>(i)).imag();
  }
  auto header = point_header(d, "k");
  header.emplace_back("re");
  header.emplace_back("im");
  write_csv(options.out_dir / "coefficients.csv", header, rows);
  report["artifacts"].push_back("coefficients.csv");

  json axes = json::array();
  for (const auto& axis : lattice.axes) axes.push_back(axis.values);
  report["results"]["residual"] = fit.residual;
  report["results"]["conjugacy_max_error"] = conjugacy;
  report["results"]["lattice_size"] = lattice.size();
  report["results"]["axes"] = axes;
  report["results"]["seed"] = seed;
}

}  // namespace

std::vector<std::string> validate_config(const json& config) {
  std::vector<std::string> diags;
  if (!config.is_object()) {
    diags.emplace_back("config: must be a JSON object");
    return diags;
  }
  const std::string task = config.value("task", "");
  if (task.empty()) {
    diags.emplace_back("task: missing");
  } else if (!known_tasks().count(task)) {
    diags.emplace_back("task: unknown '" + task + "'");
  }

  int lattice_dim = -1;
  if (config.contains("lattice")) {
    try {
      lattice_dim = build_lattice(encoding_from_json(config.at("lattice"))).dim();
    } catch (const std::exception& e) {
      diags.emplace_back(std::string("lattice: ") + e.what());
    }
  } else if (!task.empty() && known_tasks().count(task) && task_needs_lattice(task)) {
    diags.emplace_back("lattice: missing (required for task " + task + ")");
  }

  const json weighting = config.value("weighting", json{{"type", "uniform"}});
  const std::string wtype = weighting.value("type", "");
  if (wtype != "uniform" && wtype != "product" && wtype != "random" && wtype != "mps_file") {
    diags.emplace_back("weighting.type: must be uniform, product, random or mps_file");
  } else if (wtype == "product") {
    if (!weighting.contains("vectors") || !weighting.at("vectors").is_array())
      diags.emplace_back("weighting.vectors: missing per-axis weight vectors");
  } else if (wtype == "random") {
    if (!weighting.contains("bond") || !weighting.at("bond").is_number_integer() ||
        weighting.at("bond").get<int>() < 1)
      diags.emplace_back("weighting.bond: must be an integer >= 1");
    if (!weighting.contains("seed")) diags.emplace_back("weighting.seed: missing");
  } else if (wtype == "mps_file") {
    if (!weighting.contains("path")) diags.emplace_back("weighting.path: missing");
  }

  const json params = config.value("params", json::object());
  auto require_path = [&](const char* field) {
    if (!params.contains(field) || !params.at(field).is_string())
      diags.emplace_back(std::string("params.") + field + ": missing path");
  };

  if (task == "kernel-eval") {
    const bool inline_pair = params.contains("x") || params.contains("x_prime");
    const bool csv_pair = params.contains("pairs_csv");
    if (inline_pair == csv_pair) {
      diags.emplace_back("params: kernel-eval needs either x and x_prime or pairs_csv");
    } else if (inline_pair) {
      if (!params.contains("x") || !params.contains("x_prime")) {
        diags.emplace_back("params: kernel-eval needs both x and x_prime");
      } else if (lattice_dim > 0 &&
                 (static_cast<int>(params.at("x").size()) != lattice_dim ||
                  static_cast<int>(params.at("x_prime").size()) != lattice_dim)) {
        diags.emplace_back("params.x: length must match the lattice dimension");
      }
    }
  } else if (task == "gram") {
    require_path("points_csv");
  } else if (task == "krr") {
    require_path("train_csv");
    if (params.contains("lambda") && params.at("lambda").get<double>() < 0)
      diags.emplace_back("params.lambda: must be nonnegative");
  } else if (task == "rff") {
    require_path("train_csv");
    if (!params.contains("S") || !params.at("S").is_number_integer() ||
        params.at("S").get<int>() < 1)
      diags.emplace_back("params.S: must be an integer >= 1");
    if (params.contains("lambda") && params.at("lambda").get<double>() < 0)
      diags.emplace_back("params.lambda: must be nonnegative");
  } else if (task == "sample") {
    if (!params.contains("count") || !params.at("count").is_number_integer() ||
        params.at("count").get<std::int64_t>() < 1)
      diags.emplace_back("params.count: must be an integer >= 1");
  } else if (task == "bench") {
    if (!params.contains("dims") || !params.at("dims").is_array() ||
        params.at("dims").empty()) {
      diags.emplace_back("params.dims: must be a non-empty array of dimensions");
    } else {
      for (const auto& d : params.at("dims")) {
        if (!d.is_number_integer() || d.get<int>() < 1)
          diags.emplace_back("params.dims: entries must be integers >= 1");
      }
    }
  } else if (task == "pqc-check") {
    require_path("circuit");
  }

  if ((task == "sample" || task == "kernel-eval" || task == "gram" || task == "krr" ||
       task == "rff") &&
      wtype == "product" && product_weighting_is_zero(weighting)) {
    diags.emplace_back("weighting: an all-zero axis vector makes the weighting zero");
  }
  return diags;
}

int run_config(const json& config, const RunOptions& options) {
  const auto diags = validate_config(config);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << "config error: " << d << '\n';
    return kExitConfigError;
  }
  const json resolved = resolve_config(config, options);
  const std::string task = resolved.at("task").get<std::string>();

  int exit_code = kExitOk;
  try {
    std::filesystem::create_directories(options.out_dir);
    json report = new_report(resolved, options);
    Stopwatch total;
    if (task == "kernel-eval") {
      run_kernel_eval(resolved, options, report);
    } else if (task == "gram") {
      run_gram(resolved, options, report);
    } else if (task == "sample") {
      run_sample(resolved, options, report);
    } else if (task == "krr") {
      run_krr(resolved, options, report);
    } else if (task == "rff") {
      run_rff(resolved, options, report);
    } else if (task == "verify") {
      run_verify(resolved, options, report, exit_code);
    } else if (task == "bench") {
      run_bench(resolved, options, report);
    } else if (task == "pqc-check") {
      run_pqc_check(resolved, options, report);
    }
    report["timing"]["total_seconds"] = total.seconds();
    const std::string report_name = task + ".json";
    write_json_file(options.out_dir / report_name, report);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure in task " << task << ": " << e.what() << '\n';
    return kExitNumericError;
  }
  return exit_code;
}

}  // namespace mpsk
