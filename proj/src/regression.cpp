#include "mpskernel/regression.hpp"

#include <cmath>
#include <stdexcept>

#include "mpskernel/csv.hpp"
#include "mpskernel/linalg.hpp"

namespace mpsk {

namespace {

constexpr double kMaxFeatureEntries = 1e8;

void require_dataset(const Dataset& data) {
  if (data.X.rows() < 1) throw std::invalid_argument("Dataset: needs at least one row");
  if (data.y.size() != data.X.rows())
    throw std::invalid_argument("Dataset: label count does not match row count");
  if (!data.X.allFinite() || !data.y.allFinite())
    throw std::invalid_argument("Dataset: non-finite entries");
}

void require_xy_header(const std::vector<std::string>& header, bool with_y, const char* who) {
  const std::size_t d = with_y ? header.size() - 1 : header.size();
  if (with_y && (header.empty() || header.back() != "y"))
    throw std::runtime_error(std::string(who) + ": last column must be named y");
  if (d < 1) throw std::runtime_error(std::string(who) + ": no feature columns");
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != "x_" + std::to_string(j + 1))
      throw std::runtime_error(std::string(who) + ": feature columns must be named x_1..x_d");
  }
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  require_xy_header(table.header, /*with_y=*/true, "read_dataset_csv");
  Dataset data;
  data.X = table.values.leftCols(table.values.cols() - 1);
  data.y = table.values.rightCols(1);
  require_dataset(data);
  return data;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < data.X.cols(); ++j)
    header.push_back("x_" + std::to_string(j + 1));
  header.emplace_back("y");
  Eigen::MatrixXd values(data.X.rows(), data.X.cols() + 1);
  values << data.X, data.y;
  write_csv(path, header, values);
}

Eigen::MatrixXd read_points_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const bool with_y = !table.header.empty() && table.header.back() == "y";
  require_xy_header(table.header, with_y, "read_points_csv");
  return with_y ? table.values.leftCols(table.values.cols() - 1) : table.values;
}

KRRModel krr_fit(const KernelEngine& engine, const Dataset& data, double lambda, int threads) {
  require_dataset(data);
  if (lambda < 0) throw std::invalid_argument("krr_fit: lambda must be nonnegative");
  Eigen::MatrixXd g = gram(engine, data.X, data.X, threads);
  g.diagonal().array() += lambda;
  KRRModel model;
  model.alpha = solve_spd_jittered(g, data.y);
  model.train_X = data.X;
  model.lambda = lambda;
  return model;
}

Eigen::VectorXd krr_predict(const KRRModel& model, const KernelEngine& engine,
                            const Eigen::MatrixXd& queries, int threads) {
  if (queries.cols() != model.train_X.cols())
    throw std::invalid_argument("krr_predict: query dimension does not match training data");
  return gram(engine, queries, model.train_X, threads) * model.alpha;
}

RFFModel rff_fit(const FrequencyLattice& lattice, const WeightMPS& weights,
                 const Dataset& data, int sample_count, double lambda, std::uint64_t seed) {
  require_dataset(data);
  if (sample_count < 1) throw std::invalid_argument("rff_fit: sample count must be >= 1");
  if (lambda < 0) throw std::invalid_argument("rff_fit: lambda must be nonnegative");
  const auto n = data.X.rows();
  const auto s2 = static_cast<double>(2 * sample_count);
  if (static_cast<double>(n) * s2 > kMaxFeatureEntries ||
      std::min<double>(s2, static_cast<double>(n)) * std::min<double>(s2, static_cast<double>(n)) >
          kMaxFeatureEntries)
    throw std::runtime_error("rff_fit: sample count exceeds the feature memory cap");

  check_compatible(weights, lattice);
  const WeightMPS& ws = weights.symmetric ? weights : symmetrize(weights);
  const WeightMPS spectral = hadamard(c_tensor_mps(lattice), ws);

  std::mt19937_64 rng(seed);
  const auto indices = sample_indices(spectral, rng, static_cast<std::size_t>(sample_count));

  RFFModel model;
  model.frequencies.resize(sample_count, lattice.dim());
  for (int s = 0; s < sample_count; ++s) {
    const auto freq = frequency_of(lattice, indices[static_cast<std::size_t>(s)]);
    for (int j = 0; j < lattice.dim(); ++j) model.frequencies(s, j) = freq[j];
  }
  model.lambda = lambda;
  model.seed = seed;

  Eigen::MatrixXd z(n, 2 * sample_count);
  for (Eigen::Index i = 0; i < n; ++i)
    z.row(i) = rff_features(model, data.X.row(i).transpose()).transpose();

  if (2 * sample_count <= n) {
    Eigen::MatrixXd gram_features = z.transpose() * z;
    gram_features.diagonal().array() += lambda;
    model.beta = solve_spd_jittered(gram_features, z.transpose() * data.y);
  } else {
    // Same minimizer through the push-through identity; the solve stays at
    // the data-set size when the feature count is larger.
    Eigen::MatrixXd gram_points = z * z.transpose();
    gram_points.diagonal().array() += lambda;
    model.beta = z.transpose() * solve_spd_jittered(gram_points, data.y);
  }
  return model;
}

Eigen::VectorXd rff_features(const RFFModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.frequencies.cols())
    throw std::invalid_argument("rff_features: dimension mismatch");
  const int s = model.sample_count();
  const double scale = 1.0 / std::sqrt(static_cast<double>(s));
  Eigen::VectorXd z(2 * s);
  const Eigen::VectorXd phases = model.frequencies * x;
  for (int i = 0; i < s; ++i) {
    z(2 * i) = scale * std::cos(phases(i));
    z(2 * i + 1) = scale * std::sin(phases(i));
  }
  return z;
}

double rff_kernel_estimate(const RFFModel& model, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& x_prime) {
  return rff_features(model, x).dot(rff_features(model, x_prime));
}

Eigen::VectorXd rff_predict(const RFFModel& model, const Eigen::MatrixXd& queries) {
  if (queries.cols() != model.frequencies.cols())
    throw std::invalid_argument("rff_predict: dimension mismatch");
  Eigen::VectorXd out(queries.rows());
  for (Eigen::Index i = 0; i < queries.rows(); ++i)
    out(i) = rff_features(model, queries.row(i).transpose()).dot(model.beta);
  return out;
}

CostReport cost_report(std::size_t n, std::size_t sample_count, const std::string& mode,
                       double measured_fit_seconds, double measured_predict_seconds) {
  if (n < 1 || sample_count < 1)
    throw std::invalid_argument("cost_report: sizes must be positive");
  CostReport report;
  report.n = n;
  report.sample_count = sample_count;
  const auto nd = static_cast<double>(n);
  const auto sd = static_cast<double>(sample_count);
  report.krr_space_units = nd * nd;
  report.krr_time_units = nd * nd * nd;
  report.rff_space_units = nd * sd;
  report.rff_time_units = nd * sd * sd + sd * sd * sd;
  report.cheaper = report.rff_time_units < report.krr_time_units ? "rff" : "krr";
  report.mode = mode;
  report.measured_fit_seconds = measured_fit_seconds;
  report.measured_predict_seconds = measured_predict_seconds;
  return report;
}

nlohmann::json cost_report_to_json(const CostReport& report) {
  return {{"n", report.n},
          {"S", report.sample_count},
          {"predicted", {{"krr_space_units", report.krr_space_units},
                         {"krr_time_units", report.krr_time_units},
                         {"rff_space_units", report.rff_space_units},
                         {"rff_time_units", report.rff_time_units},
                         {"cheaper", report.cheaper}}},
          {"mode", report.mode},
          {"measured", {{"fit_seconds", report.measured_fit_seconds},
                        {"predict_seconds", report.measured_predict_seconds}}}};
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument("matrix_from_json: ragged rows");
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  }
  return m;
}

}  // namespace

nlohmann::json krr_to_json(const KRRModel& model) {
  return {{"model", "krr"},
          {"lambda", model.lambda},
          {"alpha", std::vector<double>(model.alpha.begin(), model.alpha.end())},
          {"train_X", matrix_to_json(model.train_X)}};
}

KRRModel krr_from_json(const nlohmann::json& j) {
  KRRModel model;
  model.lambda = j.at("lambda").get<double>();
  const auto alpha = j.at("alpha").get<std::vector<double>>();
  model.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(),
                                                  static_cast<Eigen::Index>(alpha.size()));
  model.train_X = matrix_from_json(j.at("train_X"));
  if (model.train_X.rows() != model.alpha.size())
    throw std::invalid_argument("krr_from_json: alpha length does not match training rows");
  return model;
}

nlohmann::json rff_to_json(const RFFModel& model) {
  return {{"model", "rff"},
          {"lambda", model.lambda},
          {"seed", model.seed},
          {"S", model.sample_count()},
          {"frequencies", matrix_to_json(model.frequencies)},
          {"beta", std::vector<double>(model.beta.begin(), model.beta.end())}};
}

RFFModel rff_from_json(const nlohmann::json& j) {
  RFFModel model;
  model.lambda = j.at("lambda").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.frequencies = matrix_from_json(j.at("frequencies"));
  const auto beta = j.at("beta").get<std::vector<double>>();
  model.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(),
                                                 static_cast<Eigen::Index>(beta.size()));
  if (model.beta.size() != 2 * model.frequencies.rows())
    throw std::invalid_argument("rff_from_json: beta length must be twice the sample count");
  return model;
}

}  // namespace mpsk
