#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rom/ocsvm.hpp"

namespace rom {

/// Enclosed area of one 2-D boundary model, with a grid-resolution error band.
struct PairArea {
  int i{0}, j{1};           // canonical DoF indices of the two columns
  double area{0.0};         // square degrees
  double uncertainty{0.0};  // total area of the cells the boundary crosses
  int resolution{0};
  double lo_x{0.0}, hi_x{0.0}, lo_y{0.0}, hi_y{0.0};  // evaluated window
};

/// Counts gamma >= 0 over resolution^2 cell centers spanning the support
/// vectors' bounding box plus padding. The outermost ring of cells must lie
/// entirely outside the region; when it does not, the padding is doubled
/// once, and a second failure is an error. Requires a 2-D model.
PairArea pair_area(const OcsvmModel& model, int resolution = 256, double padding_deg = 30.0);

/// Canonical DoF indices of a 2-D model whose dofs name two known angles.
std::pair<int, int> dof_pair_of(const OcsvmModel& model);

/// Symmetric nonnegative weights over unordered DoF pairs.
class WeightMatrix {
 public:
  void set(int i, int j, double weight);
  double at(int i, int j) const;  // zero when unset
  const std::map<std::pair<int, int>, double>& entries() const { return entries_; }

  std::string to_json() const;
  static WeightMatrix from_json(const std::string& text);
  static WeightMatrix load(const std::string& path);

 private:
  std::map<std::pair<int, int>, double> entries_;  // keyed with i < j
};

/// Weighted range-of-motion volume: the sum of C_ij * A_ij over unordered
/// pairs. Every pair with positive weight must come with a computed area.
double weighted_volume(const std::vector<PairArea>& areas, const WeightMatrix& weights);

/// Ratio of impaired to healthy volume. The healthy volume must be positive.
double impairment_index(double impaired_volume, double healthy_volume);

struct McVolume {
  double volume{0.0};
  double std_error{0.0};
};

/// Monte-Carlo volume of an N-D model over its support-vector bounding box
/// plus padding (the lattice procedure is only workable in two dimensions).
McVolume mc_volume(const OcsvmModel& model, std::int64_t samples = 200000,
                   double padding_deg = 30.0, std::uint64_t seed = 1);

/// gamma sampled on a regular vertex grid for contour plotting:
/// values(r, c) = gamma(xs[c], ys[r]). Requires a 2-D model.
struct IsolineLattice {
  Eigen::VectorXd xs, ys;
  Eigen::MatrixXd values;
};

IsolineLattice isoline_lattice(const OcsvmModel& model, int resolution = 256, double padding_deg = 30.0);

}  // namespace rom
