#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rom {

/// Unit quaternion (w, x, y, z) representing a rotation.
struct Quaternion {
  double w{1.0}, x{0.0}, y{0.0}, z{0.0};

  double norm() const;
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion operator-() const { return {-w, -x, -y, -z}; }
  double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  Quaternion operator*(const Quaternion& o) const;  // Hamilton product
};

using RotationMatrix = Eigen::Matrix3d;

bool is_unit_quaternion(const Quaternion& q, double tol = 1e-6);
// Orthonormality and det(R)=1, per-entry tolerance.
bool is_rotation_matrix(const RotationMatrix& R, double tol = 1e-9);

/// Wraps an angle in degrees to (-180, 180].
double wrap_degrees(double deg);

/// Resolves the +q/-q ambiguity along one bone's trajectory: flips signs so
/// that consecutive quaternions have nonnegative dot products. The first
/// element is kept as-is. Throws SchemaError on non-unit input.
std::vector<Quaternion> hemisphere_align(const std::vector<Quaternion>& frames);

/// Converts a unit quaternion to a proper rotation matrix.
/// Throws SchemaError if the norm deviates from 1 by more than 1e-6.
RotationMatrix quat_to_rotmat(const Quaternion& q);

/// Inverse of quat_to_rotmat; returns the representative with w >= 0.
Quaternion rotmat_to_quat(const RotationMatrix& R);

/// Rotation of the distal frame expressed in the proximal frame:
/// (R_prox)^T * R_dist, both given in global coordinates.
RotationMatrix relative_rotation(const RotationMatrix& R_prox, const RotationMatrix& R_dist);

/// Rz(z) * Rx(x) * Ry(y), angles in degrees.
RotationMatrix compose_zxy(double z_deg, double x_deg, double y_deg);

struct EulerZxy {
  double z_deg{0.0};
  double x_deg{0.0};  // principal branch, [-90, 90]
  double y_deg{0.0};
  bool gimbal{false};
};

/// Extracts ZXY Euler angles (degrees) with x on the principal branch.
/// Near gimbal lock (|cos x| < sin 1deg) the y angle is indeterminate; it is
/// pinned to prev_y_deg (or 0 without history), z is solved from the
/// remaining constraint and the sample is flagged.
EulerZxy rotmat_to_euler_zxy(const RotationMatrix& R, std::optional<double> prev_y_deg = std::nullopt);

struct BonePose {
  Eigen::Vector3d position{0.0, 0.0, 0.0};  // meters, global frame
  Quaternion orientation;                    // global frame
};

/// One motion-capture frame: global pose of every tracked bone.
struct SkeletonFrame {
  double timestamp{0.0};  // seconds
  std::map<std::string, BonePose> bones;
};

enum class Side { left, right };

/// Upper-body chain for one arm: hip -> chest -> upper arm -> forearm -> hand.
/// The zero pose is the configuration in which all bone frames share one
/// orientation (upper limb parallel to the trunk, elbow fully extended, palm
/// facing the body); every joint rotation is the identity there.
struct KinematicChain {
  struct Link {
    std::string bone;
    std::string parent;  // empty for the root
  };

  Side side{Side::right};
  std::string hip{"Hip"};
  std::string chest{"Chest"};
  std::string upper_arm;
  std::string forearm;
  std::string hand;

  static KinematicChain upper_body(Side side);
  static KinematicChain from_json_file(const std::string& path);

  /// Ordered (bone, parent) pairs, each parent preceding its children.
  std::vector<Link> links() const;
  std::vector<std::string> bone_names() const;
  void validate() const;  // distinct, nonempty names
};

inline constexpr int kArmDofCount = 7;

/// Joint-angle vector for one arm, degrees, wrapped to (-180, 180].
/// Order: shoulder abd/add, shoulder flex/ext, shoulder rotation,
/// elbow flex/ext, elbow sup/pron, wrist flex/ext, wrist deviation.
struct JointAngles {
  Eigen::Matrix<double, kArmDofCount, 1> q = Eigen::Matrix<double, kArmDofCount, 1>::Zero();
  std::array<bool, kArmDofCount> gimbal{};  // true where the owning joint hit gimbal lock
};

/// Canonical per-DoF convention: which joint and ZXY slot each angle comes
/// from and the sign applied per side. Signs are chosen so that clinically
/// positive motions (abduction, flexion, internal rotation, supination,
/// radial deviation) are positive for both arms and mirrored poses of the
/// two arms produce identical angle vectors.
struct DofConvention {
  const char* name;
  int joint;   // 0 shoulder (chest->upper arm), 1 elbow, 2 wrist
  char slot;   // 'z', 'x' or 'y' of the ZXY decomposition
  double sign_right;
  double sign_left;
};

const std::array<DofConvention, kArmDofCount>& dof_conventions();
const std::array<const char*, kArmDofCount>& dof_names();

/// Per-joint y-angle history used to disambiguate gimbal-locked frames in a
/// sequence. One instance per processed trajectory.
struct ExtractionState {
  std::array<std::optional<double>, 3> prev_y_deg{};
};

/// Extracts the 7-DoF joint-angle vector of one arm from global bone
/// orientations via relative rotations and ZXY Euler decomposition.
/// Throws SchemaError when a chain bone is missing from the frame.
JointAngles extract_joint_angles(const SkeletonFrame& frame, const KinematicChain& chain,
                                 ExtractionState* state = nullptr);

/// Forward composition: builds a frame whose bone orientations realize the
/// given joint angles (bone frames aligned with the world at the zero pose).
SkeletonFrame synthesize_frame(const KinematicChain& chain,
                               const Eigen::Matrix<double, kArmDofCount, 1>& q_deg,
                               double timestamp = 0.0);

}  // namespace rom
