#include "rom/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "json.hpp"
#include "rom/errors.hpp"

namespace rom {

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr double kRadPerDeg = std::numbers::pi / 180.0;

// cos(x) below sin(1deg) means x is within 1 degree of +-90: the Z and Y
// axes have collapsed onto each other and only z + sign(x)*y is observable.
const double kGimbalThreshold = std::sin(kRadPerDeg);

Eigen::Quaterniond to_eigen(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }

}  // namespace

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (n == 0.0) throw SchemaError("cannot normalize a zero quaternion");
  return {w / n, x / n, y / n, z / n};
}

Quaternion Quaternion::operator*(const Quaternion& o) const {
  const Eigen::Quaterniond r = to_eigen(*this) * to_eigen(o);
  return {r.w(), r.x(), r.y(), r.z()};
}

bool is_unit_quaternion(const Quaternion& q, double tol) {
  return std::abs(q.norm() - 1.0) <= tol;
}

bool is_rotation_matrix(const RotationMatrix& R, double tol) {
  const RotationMatrix gram = R.transpose() * R;
  return (gram - RotationMatrix::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(R.determinant() - 1.0) <= 10.0 * tol;
}

double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) {
    r += 360.0;
  } else if (r > 180.0) {
    r -= 360.0;
  }
  return r;
}

std::vector<Quaternion> hemisphere_align(const std::vector<Quaternion>& frames) {
  std::vector<Quaternion> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!is_unit_quaternion(frames[i])) {
      throw SchemaError("sample " + std::to_string(i) + ": quaternion norm deviates from 1");
    }
    if (out.empty()) {
      out.push_back(frames[i]);
    } else {
      out.push_back(out.back().dot(frames[i]) < 0.0 ? -frames[i] : frames[i]);
    }
  }
  return out;
}

RotationMatrix quat_to_rotmat(const Quaternion& q) {
  if (!is_unit_quaternion(q)) {
    throw SchemaError("orientation quaternion is not unit length (norm " + std::to_string(q.norm()) + ")");
  }
  return to_eigen(q).normalized().toRotationMatrix();
}

Quaternion rotmat_to_quat(const RotationMatrix& R) {
  if (!is_rotation_matrix(R, 1e-6)) {
    throw SchemaError("matrix is not a proper rotation");
  }
  const Eigen::Quaterniond q(R);
  Quaternion out{q.w(), q.x(), q.y(), q.z()};
  return out.w < 0.0 ? -out : out;
}

RotationMatrix relative_rotation(const RotationMatrix& R_prox, const RotationMatrix& R_dist) {
  return R_prox.transpose() * R_dist;
}

RotationMatrix compose_zxy(double z_deg, double x_deg, double y_deg) {
  return (Eigen::AngleAxisd(z_deg * kRadPerDeg, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(x_deg * kRadPerDeg, Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(y_deg * kRadPerDeg, Eigen::Vector3d::UnitY()))
      .toRotationMatrix();
}

EulerZxy rotmat_to_euler_zxy(const RotationMatrix& R, std::optional<double> prev_y_deg) {
  EulerZxy e;
  const double sx = std::clamp(R(2, 1), -1.0, 1.0);
  const double x = std::asin(sx);
  e.x_deg = x * kDegPerRad;
  if (std::cos(x) < kGimbalThreshold) {
    // R(1,0) = sin(z + s*y)*|cos x| and R(0,0) = cos(z + s*y)*|cos x| up to
    // O(cos^2 x); only the sum survives, so pin y and solve for z.
    e.gimbal = true;
    const double s = sx >= 0.0 ? 1.0 : -1.0;
    e.y_deg = wrap_degrees(prev_y_deg.value_or(0.0));
    const double zy_deg = std::atan2(R(1, 0), R(0, 0)) * kDegPerRad;
    e.z_deg = wrap_degrees(zy_deg - s * e.y_deg);
  } else {
    e.z_deg = wrap_degrees(std::atan2(-R(0, 1), R(1, 1)) * kDegPerRad);
    e.y_deg = wrap_degrees(std::atan2(-R(2, 0), R(2, 2)) * kDegPerRad);
  }
  return e;
}

KinematicChain KinematicChain::upper_body(Side side) {
  KinematicChain c;
  c.side = side;
  const std::string prefix = side == Side::right ? "Right" : "Left";
  c.upper_arm = prefix + "UpperArm";
  c.forearm = prefix + "Forearm";
  c.hand = prefix + "Hand";
  return c;
}

KinematicChain KinematicChain::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open chain config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("chain config " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("side")) {
    throw SchemaError("chain config " + path + ": expected an object with a \"side\" key");
  }
  const std::string side_str = j.at("side").get<std::string>();
  Side side;
  if (side_str == "right") {
    side = Side::right;
  } else if (side_str == "left") {
    side = Side::left;
  } else {
    throw SchemaError("chain config " + path + ": side must be \"right\" or \"left\"");
  }
  KinematicChain c = upper_body(side);
  auto assign_if = [&](const char* key, std::string& field) {
    if (j.contains(key)) field = j.at(key).get<std::string>();
  };
  assign_if("hip", c.hip);
  assign_if("chest", c.chest);
  assign_if("upper_arm", c.upper_arm);
  assign_if("forearm", c.forearm);
  assign_if("hand", c.hand);
  c.validate();
  return c;
}

std::vector<KinematicChain::Link> KinematicChain::links() const {
  return {{hip, ""}, {chest, hip}, {upper_arm, chest}, {forearm, upper_arm}, {hand, forearm}};
}

std::vector<std::string> KinematicChain::bone_names() const {
  return {hip, chest, upper_arm, forearm, hand};
}

void KinematicChain::validate() const {
  const auto names = bone_names();
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw SchemaError("kinematic chain has an empty bone name");
    if (!seen.insert(n).second) throw SchemaError("kinematic chain repeats bone name '" + n + "'");
  }
}

const std::array<DofConvention, kArmDofCount>& dof_conventions() {
  static const std::array<DofConvention, kArmDofCount> table = {{
      {"shoulder_abd_add", 0, 'x', -1.0, 1.0},
      {"shoulder_flex_ext", 0, 'z', 1.0, 1.0},
      {"shoulder_rotation", 0, 'y', 1.0, -1.0},
      {"elbow_flex_ext", 1, 'z', 1.0, 1.0},
      {"elbow_sup_pron", 1, 'y', -1.0, 1.0},
      {"wrist_flex_ext", 2, 'z', 1.0, 1.0},
      {"wrist_deviation", 2, 'x', -1.0, 1.0},
  }};
  return table;
}

const std::array<const char*, kArmDofCount>& dof_names() {
  static const std::array<const char*, kArmDofCount> names = [] {
    std::array<const char*, kArmDofCount> n{};
    const auto& table = dof_conventions();
    for (int i = 0; i < kArmDofCount; ++i) n[i] = table[i].name;
    return n;
  }();
  return names;
}

JointAngles extract_joint_angles(const SkeletonFrame& frame, const KinematicChain& chain,
                                 ExtractionState* state) {
  chain.validate();
  auto rotmat_of = [&](const std::string& bone) {
    const auto it = frame.bones.find(bone);
    if (it == frame.bones.end()) throw SchemaError("bone '" + bone + "' missing from frame");
    return quat_to_rotmat(it->second.orientation);
  };
  const RotationMatrix R_chest = rotmat_of(chain.chest);
  const RotationMatrix R_upper = rotmat_of(chain.upper_arm);
  const RotationMatrix R_fore = rotmat_of(chain.forearm);
  const RotationMatrix R_hand = rotmat_of(chain.hand);

  const std::array<RotationMatrix, 3> rel = {relative_rotation(R_chest, R_upper),
                                             relative_rotation(R_upper, R_fore),
                                             relative_rotation(R_fore, R_hand)};
  std::array<EulerZxy, 3> joint{};
  for (int jidx = 0; jidx < 3; ++jidx) {
    std::optional<double> prev;
    if (state) prev = state->prev_y_deg[jidx];
    joint[jidx] = rotmat_to_euler_zxy(rel[jidx], prev);
    if (state) state->prev_y_deg[jidx] = joint[jidx].y_deg;
  }

  JointAngles out;
  const auto& table = dof_conventions();
  for (int d = 0; d < kArmDofCount; ++d) {
    const DofConvention& conv = table[d];
    const EulerZxy& e = joint[conv.joint];
    const double raw = conv.slot == 'z' ? e.z_deg : conv.slot == 'x' ? e.x_deg : e.y_deg;
    const double sign = chain.side == Side::right ? conv.sign_right : conv.sign_left;
    out.q[d] = wrap_degrees(sign * raw);
    out.gimbal[d] = e.gimbal;
  }
  return out;
}

SkeletonFrame synthesize_frame(const KinematicChain& chain,
                               const Eigen::Matrix<double, kArmDofCount, 1>& q_deg,
                               double timestamp) {
  chain.validate();
  // Undo the per-side sign convention to recover each joint's raw ZXY angles.
  std::array<Eigen::Vector3d, 3> zxy;  // per joint: (z, x, y) in degrees
  zxy.fill(Eigen::Vector3d::Zero());
  const auto& table = dof_conventions();
  for (int d = 0; d < kArmDofCount; ++d) {
    const DofConvention& conv = table[d];
    const double sign = chain.side == Side::right ? conv.sign_right : conv.sign_left;
    const int slot = conv.slot == 'z' ? 0 : conv.slot == 'x' ? 1 : 2;
    zxy[conv.joint][slot] = sign * q_deg[d];
  }

  const RotationMatrix R_hip = RotationMatrix::Identity();
  const RotationMatrix R_chest = RotationMatrix::Identity();
  const RotationMatrix R_upper = R_chest * compose_zxy(zxy[0][0], zxy[0][1], zxy[0][2]);
  const RotationMatrix R_fore = R_upper * compose_zxy(zxy[1][0], zxy[1][1], zxy[1][2]);
  const RotationMatrix R_hand = R_fore * compose_zxy(zxy[2][0], zxy[2][1], zxy[2][2]);

  const double lateral = chain.side == Side::right ? 0.2 : -0.2;
  SkeletonFrame f;
  f.timestamp = timestamp;
  f.bones[chain.hip] = {{0.0, 1.0, 0.0}, rotmat_to_quat(R_hip)};
  f.bones[chain.chest] = {{0.0, 1.4, 0.0}, rotmat_to_quat(R_chest)};
  f.bones[chain.upper_arm] = {{lateral, 1.5, 0.0}, rotmat_to_quat(R_upper)};
  f.bones[chain.forearm] = {{lateral, 1.2, 0.0}, rotmat_to_quat(R_fore)};
  f.bones[chain.hand] = {{lateral, 0.95, 0.0}, rotmat_to_quat(R_hand)};
  return f;
}

}  // namespace rom
