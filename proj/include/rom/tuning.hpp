#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rom/ocsvm.hpp"

namespace rom {

/// Minimum-norm point of the convex hull of the given rows (Wolfe's method).
/// Returns the squared distance from the origin together with the convex
/// weights that realize it (zero for rows outside the active support).
struct MinNormResult {
  double norm_sq{0.0};
  Eigen::VectorXd lambda;
};

MinNormResult min_norm_point(const Eigen::MatrixXd& points);

struct EdgeResult {
  bool edge{false};
  bool low_confidence{false};  // too few neighbors to decide reliably
};

/// A support vector lies on the edge of the sampled region iff the origin is
/// outside the convex hull of the neighbor offsets {x_j - sv}. Up to
/// max_misclassified neighbors may be discarded (largest hull weight first)
/// before accepting an interior verdict. Fewer than min_neighbors rows yields
/// a low-confidence edge.
EdgeResult edge_sv_test(const Eigen::MatrixXd& neighbor_offsets, int max_misclassified = 0,
                        int min_neighbors = 0);

struct MEsvConfig {
  double radius{0.0};        // <= 0: four times the median nearest-neighbor distance
  int min_neighbors{5};      // below this a support vector counts as a low-confidence edge
  int max_misclassified{0};  // per-SV outlier budget in the hull test
  int max_interior{-1};      // < 0: max_interior_fraction of the support vector count
  double max_interior_fraction{0.1};  // interior allowance; raise for strongly concave data
};

struct MEsvResult {
  bool passed{false};
  int interior_count{0};
  int low_confidence_count{0};
  int max_interior{0};
  double radius{0.0};
  std::vector<int> interior_svs;  // row indices into the model's support vectors
};

/// Checks that at most max_interior support vectors sit strictly inside the
/// cloud of training samples. Interior support vectors indicate an
/// overfitted, fragmented boundary.
MEsvResult m_esv_check(const OcsvmModel& model, const Eigen::MatrixXd& samples, const MEsvConfig& config);

/// Median nearest-neighbor distance over the rows (the M-ESV radius unit).
double median_nn_distance(const Eigen::MatrixXd& samples);

struct InclusionResult {
  bool passed{false};
  int violations{0};
  double min_gamma{0.0};
};

/// Constraint: every reserved test sample must satisfy gamma >= 0.
/// Throws SchemaError when the test set is empty.
InclusionResult constraint_test_inclusion(const OcsvmModel& model, const Eigen::MatrixXd& test);

/// 2N synthetic outside points: per dimension, one at min - offset and one at
/// max + offset, all other coordinates at the column mean.
Eigen::MatrixXd make_negative_samples(const Eigen::MatrixXd& train, double offset_deg = 5.0);

struct NegativeResult {
  bool passed{false};
  int violations{0};
  double max_gamma{0.0};
};

/// Constraint: every negative sample must satisfy gamma < 0.
/// Throws SchemaError when the negative set is empty.
NegativeResult constraint_negative_exclusion(const OcsvmModel& model, const Eigen::MatrixXd& negatives);

struct GridConfig {
  double nu_lo{0.005};
  double nu_hi{0.5};
  int nu_count{8};
  double sigma_lo{5.0};
  double sigma_hi{200.0};
  int sigma_count{8};
  int refine_rounds{4};                    // extra rounds after the initial sweep
  double boundary_change_threshold{0.01};  // early stop when the winning boundary settles
  int eval_points_per_dim{64};
  double eval_padding{20.0};
  double negative_offset{5.0};
  int threads{0};  // 0: use the hardware concurrency

  void validate() const;
};

struct CellDiagnostics {
  double nu{0.0};
  double sigma{0.0};
  bool trained{false};
  bool c1_inclusion{false};
  bool c2_mesv{false};
  bool c3_negatives{false};
  bool accepted{false};
  double volume{0.0};  // lattice estimate of the enclosed region, accepted cells only
  double sv_fraction{0.0};
  std::string note;
};

struct TuningRound {
  int index{0};
  double nu_lo{0.0}, nu_hi{0.0}, sigma_lo{0.0}, sigma_hi{0.0};
  int nu_count{0}, sigma_count{0};
  std::vector<CellDiagnostics> cells;
  double boundary_change{1.0};  // winner disagreement vs the previous round
};

struct TuningReport {
  std::vector<TuningRound> rounds;
  bool feasible{false};
  double best_nu{0.0};
  double best_sigma{0.0};
  double best_volume{0.0};
  std::map<std::string, int> failure_counts;  // populated when infeasible

  std::string to_json() const;
  void write_cells_csv(const std::string& path) const;
};

struct TuneResult {
  TuningReport report;
  std::optional<OcsvmModel> model;  // the winning model, when feasible
};

/// Constraint-filtered grid search over (nu, sigma), both axes log-spaced.
/// Accepted cells pass all three constraints; rounds shrink onto the accepted
/// box at doubled resolution; the winner is the accepted cell with the
/// smallest enclosed volume (ties: larger nu, then smaller sigma).
TuneResult grid_search(const Eigen::MatrixXd& train, const Eigen::MatrixXd& test,
                       const GridConfig& grid, const MEsvConfig& mesv, const TrainConfig& base);

}  // namespace rom
