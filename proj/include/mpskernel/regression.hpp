#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

#include "mpskernel/kernel_engine.hpp"

namespace mpsk {

struct Dataset {
  Eigen::MatrixXd X;  // n x d
  Eigen::VectorXd y;  // n
};

/// CSV with header columns x_1..x_d,y.
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// Points-only CSV: header columns x_1..x_d; a trailing y column, if
/// present, is ignored.
Eigen::MatrixXd read_points_csv(const std::filesystem::path& path);

struct KRRModel {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd train_X;
  double lambda = 0.0;
};

/// Kernel ridge regression: solves (G + lambda I) alpha = y by Cholesky
/// with the escalating-jitter fallback. Ridge convention: no n-scaling of
/// lambda.
KRRModel krr_fit(const KernelEngine& engine, const Dataset& data, double lambda,
                 int threads = 1);

Eigen::VectorXd krr_predict(const KRRModel& model, const KernelEngine& engine,
                            const Eigen::MatrixXd& queries, int threads = 1);

struct RFFModel {
  Eigen::MatrixXd frequencies;  // S x d, drawn from the kernel's spectral measure
  Eigen::VectorXd beta;         // 2S linear weights over cos/sin pairs
  double lambda = 0.0;
  std::uint64_t seed = 0;

  int sample_count() const { return static_cast<int>(frequencies.rows()); }
};

/// Random-features baseline. Frequencies are exact samples from the
/// distribution defined by the kernel's spectral weights (the squared
/// entries of the engine's weighted chain, which fold the zero-frequency
/// normalization in), so the feature inner product is an unbiased
/// estimator of the exact kernel. Features are cos/sin pairs scaled by
/// 1/sqrt(S); the linear weights solve the regularized least squares
/// (Z^T Z + lambda I) beta = Z^T y.
RFFModel rff_fit(const FrequencyLattice& lattice, const WeightMPS& weights,
                 const Dataset& data, int sample_count, double lambda, std::uint64_t seed);

/// Feature map of one point; z(x).dot(z(x)) == 1 for every x.
Eigen::VectorXd rff_features(const RFFModel& model, const Eigen::VectorXd& x);

double rff_kernel_estimate(const RFFModel& model, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& x_prime);

Eigen::VectorXd rff_predict(const RFFModel& model, const Eigen::MatrixXd& queries);

/// Predicted asymptotic cost units for the two pipelines at problem sizes
/// (n, S), plus measured wall times for whichever pipeline actually ran.
struct CostReport {
  std::size_t n = 0;
  std::size_t sample_count = 0;
  double krr_space_units = 0;  // n^2
  double krr_time_units = 0;   // n^3
  double rff_space_units = 0;  // n S
  double rff_time_units = 0;   // n S^2 + S^3
  std::string cheaper;         // "krr" or "rff" by time units
  std::string mode;
  double measured_fit_seconds = 0;
  double measured_predict_seconds = 0;
};

CostReport cost_report(std::size_t n, std::size_t sample_count, const std::string& mode,
                       double measured_fit_seconds = 0, double measured_predict_seconds = 0);
nlohmann::json cost_report_to_json(const CostReport& report);

nlohmann::json krr_to_json(const KRRModel& model);
KRRModel krr_from_json(const nlohmann::json& j);
nlohmann::json rff_to_json(const RFFModel& model);
RFFModel rff_from_json(const nlohmann::json& j);

}  // namespace mpsk
