#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rom/kinematics.hpp"

namespace rom {

/// Where a block of samples came from. Clinical and exploration rows train
/// the boundary; test rows only validate it.
enum class Provenance { clinical, exploration, test };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// Joint-angle samples for one subject and arm. Rows are samples, columns are
/// degrees of freedom; angles are in degrees, wrapped to (-180, 180].
struct RomDataset {
  Eigen::MatrixXd samples;             // m x N
  std::vector<Provenance> provenance;  // length m
  std::string subject;
  Side arm{Side::right};
  std::vector<int> dof_indices;  // canonical DoF index per column; empty for synthetic data

  int sample_count() const { return static_cast<int>(samples.rows()); }
  int dimension() const { return static_cast<int>(samples.cols()); }

  /// Appends rows (wrapping each angle) under one provenance tag.
  void append(const Eigen::MatrixXd& rows, Provenance p);

  Eigen::MatrixXd by_provenance(Provenance p) const;
  /// Clinical and exploration rows stacked in original order.
  Eigen::MatrixXd training_samples() const;

  /// New dataset restricted to the given column indices.
  RomDataset select_columns(const std::vector<int>& cols) const;

  void validate() const;  // consistent row/tag counts, finite entries
};

/// Merges two sample sets (typically guided clinical motion plus free
/// exploration) into one training dataset, keeping per-sample provenance.
RomDataset assemble(const RomDataset& clinical, const RomDataset& exploration);

struct DofRange {
  double lo{0.0};
  double hi{0.0};
  double mean{0.0};
};

/// Per-column observed min/max/mean. Throws SchemaError on an empty matrix.
std::vector<DofRange> dof_ranges(const Eigen::MatrixXd& samples);

enum class SubsampleMethod { stride, farthest_point };

/// Row indices in [0, m) chosen by the given strategy; identity when
/// target >= m. Stride keeps floor(i*m/target); farthest-point starts from
/// row 0 and greedily adds the row farthest from the chosen set.
/// Requires target >= 2.
std::vector<int> subsample_indices(const Eigen::MatrixXd& samples, int target, SubsampleMethod method);

Eigen::MatrixXd subsample(const Eigen::MatrixXd& samples, int target,
                          SubsampleMethod method = SubsampleMethod::farthest_point);

inline constexpr int kDefaultSubsampleTarget = 4000;

// --- Synthetic planar shapes with known area, for calibration work ---

enum class ShapeKind { disk, ellipse, annulus_sector, crescent };

/// Geometry of one planar test shape.
///   disk:           radius a around center
///   ellipse:        semi-axes a (x) and b (y)
///   annulus_sector: radii a < b, polar angle in [theta0, theta1] degrees
///   crescent:       disk of radius a minus the disk of radius b centered
///                   d to the right of it; needs |a - b| < d < a + b
struct ShapeSpec {
  ShapeKind kind{ShapeKind::disk};
  Eigen::Vector2d center{0.0, 0.0};
  double a{1.0};
  double b{0.0};
  double theta0{0.0};
  double theta1{0.0};
  double d{0.0};
};

void validate_shape(const ShapeSpec& spec);
double shape_area(const ShapeSpec& spec);
bool shape_contains(const ShapeSpec& spec, const Eigen::Vector2d& point);

/// count i.i.d. uniform samples from the shape's interior (rejection from the
/// bounding box, deterministic for a given seed).
Eigen::MatrixXd sample_shape(const ShapeSpec& spec, int count, std::uint64_t seed);

// --- CSV and manifest I/O ---

/// Reads a motion-capture CSV with header
///   timestamp,<Bone>.qw,<Bone>.qx,<Bone>.qy,<Bone>.qz,<Bone>.px,<Bone>.py,<Bone>.pz,...
/// (seven consecutive columns per bone). Every name in required_bones must
/// appear; extra bones are kept. Throws SchemaError on malformed input.
std::vector<SkeletonFrame> load_frames_csv(const std::string& path,
                                           const std::vector<std::string>& required_bones);

void save_frames_csv(const std::string& path, const std::vector<SkeletonFrame>& frames,
                     const std::vector<std::string>& bones);

/// A timestamped joint-angle trajectory.
struct AngleTrack {
  std::vector<double> timestamps;
  Eigen::MatrixXd angles;     // m x N, degrees
  std::vector<bool> gimbal;   // per sample: any DoF flagged during extraction
};

/// Runs the full per-frame pipeline: hemisphere-aligns each bone's quaternion
/// trajectory, then extracts the 7-DoF angle vector frame by frame.
AngleTrack extract_angle_track(const std::vector<SkeletonFrame>& frames,
                               const KinematicChain& chain);

/// Writes header timestamp,q1,...,qN,gimbal and one row per sample.
void save_angles_csv(const std::string& path, const AngleTrack& track);

/// Reads an angle CSV (header timestamp,q1,...,qN with optional trailing
/// gimbal column). If expected_dims >= 0 the column count must match.
AngleTrack load_angles_csv(const std::string& path, int expected_dims = -1);

/// Provenance record for an assembled dataset.
struct DatasetManifest {
  std::string subject;
  std::string arm;  // "right" or "left"
  std::vector<std::string> dof_names;
  std::map<std::string, int> counts;  // provenance tag -> rows
  std::vector<std::string> sources;

  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);
};

}  // namespace rom
