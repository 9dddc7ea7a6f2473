#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rom {

/// Gaussian kernel exp(-|a-b|^2 / (2 sigma^2)).
double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma);

enum class Region { inside, boundary, outside };

std::string region_name(Region r);

struct TrainConfig {
  double nu{0.05};     // in (0, 1]: upper bound on the outlier fraction,
                       // lower bound on the support-vector fraction
  double sigma{40.0};  // kernel width, same units as the samples (degrees)
  double tolerance{1e-6};
  std::uint64_t max_iterations{10'000'000};
  std::size_t cache_bytes{128u << 20};  // kernel row cache budget
};

/// Trained one-class boundary. The decision function is
///   gamma(q) = sum_i alpha_i k(q, sv_i) - rho,
/// nonnegative inside the learned region, negative outside.
struct OcsvmModel {
  Eigen::MatrixXd support_vectors;  // one per row
  Eigen::VectorXd alphas;           // matching weights, sum to 1
  double rho{0.0};
  double sigma{1.0};
  double nu{0.0};
  int training_count{0};
  double sv_fraction{0.0};
  std::vector<std::string> dofs;  // optional column names

  int dimension() const { return static_cast<int>(support_vectors.cols()); }
  int sv_count() const { return static_cast<int>(support_vectors.rows()); }

  double gamma(const Eigen::VectorXd& q) const;
  /// Row-wise batch evaluation.
  Eigen::VectorXd gamma_rows(const Eigen::MatrixXd& points) const;
  /// Analytic gradient: sum_i alpha_i k(q, sv_i) (sv_i - q) / sigma^2.
  Eigen::VectorXd gamma_gradient(const Eigen::VectorXd& q) const;
  bool contains(const Eigen::VectorXd& q, double band = 0.0) const { return gamma(q) >= -band; }
  Region classify(const Eigen::VectorXd& q, double band = 0.0) const;

  std::string to_json() const;
  static OcsvmModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static OcsvmModel load(const std::string& path);

  void validate() const;
};

struct TrainDiagnostics {
  std::uint64_t iterations{0};
  double kkt_violation{0.0};  // measured on freshly recomputed gradients
  std::vector<int> sv_indices;
};

struct TrainResult {
  OcsvmModel model;
  TrainDiagnostics diagnostics;
};

/// Solves min_alpha 1/2 alpha^T K alpha subject to 0 <= alpha_i <= 1/(nu m),
/// sum alpha_i = 1 by sequential minimal optimization on maximally violating
/// pairs, then recovers rho from the free support vectors. Throws
/// ConvergenceError if the pair violation cannot be driven below
/// config.tolerance within config.max_iterations.
TrainResult train_ocsvm(const Eigen::MatrixXd& samples, const TrainConfig& config);

}  // namespace rom
