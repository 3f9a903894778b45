#pragma once

#include "musclework/skeleton.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace musclework {

using Mat3 = Eigen::Matrix3d;

enum class Side : int { Left = 0, Right = 1 };

inline constexpr double kGravity = 9.81;

/// Actuated degrees of freedom. Zero pose is anatomical neutral standing
/// (arms hanging, feet flat, facing +z with y up and the subject's left on +x).
/// Positive directions are documented in docs/dof.md.
enum class DofId : int {
  ShoulderFlexionL = 0,
  ShoulderAbductionL,
  ElbowFlexionL,
  HipFlexionL,
  HipAbductionL,
  KneeFlexionL,
  AnkleFlexionL,
  ShoulderFlexionR,
  ShoulderAbductionR,
  ElbowFlexionR,
  HipFlexionR,
  HipAbductionR,
  KneeFlexionR,
  AnkleFlexionR,
  TrunkFlexion,
};

inline constexpr std::size_t kDofCount = 15;
constexpr std::size_t index(DofId d) { return static_cast<std::size_t>(d); }

/// Per-side DOF kinds in the order they appear for each side.
enum class DofKind : int { ShoulderFlexion = 0, ShoulderAbduction, ElbowFlexion, HipFlexion, HipAbduction, KneeFlexion, AnkleFlexion };

constexpr DofId dof(Side s, DofKind k) { return static_cast<DofId>(static_cast<int>(s) * 7 + static_cast<int>(k)); }

std::string_view dof_name(DofId d); // e.g. "knee_flexion_l", "trunk_flexion"
std::optional<DofId> dof_from_name(std::string_view name);

using DofVector = std::array<double, kDofCount>;

struct JointAngleFrame {
  std::int64_t t_ms = 0;
  DofVector angles{};
  DofVector velocities{};
  DofVector accelerations{};

  double angle(DofId d) const { return angles[index(d)]; }
  double& angle(DofId d) { return angles[index(d)]; }
};

/// Rigid segments carried by the kinematic tree. Shoulder girdles are fixed
/// to the trunk with their origin at the glenohumeral joint; they exist so
/// muscle origins near the shoulder follow the subject's shoulder position.
enum class SegmentId : int {
  Pelvis = 0,
  Trunk,
  ShoulderL,
  UpperArmL,
  ForearmL,
  ThighL,
  ShankL,
  FootL,
  ShoulderR,
  UpperArmR,
  ForearmR,
  ThighR,
  ShankR,
  FootR,
};
inline constexpr std::size_t kSegmentCount = 14;
constexpr std::size_t index(SegmentId s) { return static_cast<std::size_t>(s); }

std::string_view segment_name(SegmentId s); // "pelvis", "upper_arm_l", ...
std::optional<SegmentId> segment_from_name(std::string_view name);

/// World placement of a segment frame. `scale` is the subject/reference
/// length ratio applied to points expressed in the reference body.
struct SegmentPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 origin = Vec3::Zero();
  double scale = 1.0;

  Vec3 to_world(const Vec3& local) const { return origin + rotation * (scale * local); }
};

struct Pose {
  std::array<SegmentPose, kSegmentCount> segments{};
  std::array<Vec3, kJointCount> joints{};
  std::uint32_t present = (1u << kSegmentCount) - 1; // bit per SegmentId

  bool has(SegmentId s) const { return (present >> index(s)) & 1u; }
  const SegmentPose& segment(SegmentId s) const { return segments[index(s)]; }
  const Vec3& joint(JointId j) const { return joints[index(j)]; }
};

/// Forward kinematics from the pelvis outward. `heading` columns are the
/// subject's left, up and forward axes. No range checking here.
Pose forward_pose(const DofVector& angles, const BodyScale& scale, const Vec3& root = Vec3::Zero(),
                  const Mat3& heading = Mat3::Identity());

/// Joint angles from positions (angles only; velocities/accelerations zero).
JointAngleFrame compute_joint_angles(const SkeletonFrame& f);

/// Central differences inside, one-sided at both ends; angle differences are
/// wrapped to (-pi, pi]. Requires at least 3 frames.
void differentiate(std::vector<JointAngleFrame>& frames, double dt_s);

/// Mass-bearing body segments of the anthropometric table (per side where applicable).
enum class MassSegment : int { Trunk = 0, UpperArm, Forearm, Thigh, Shank, Foot };
inline constexpr std::size_t kMassSegmentCount = 6;

struct SegmentInertia {
  double mass_frac = 0.0;
  double com_frac = 0.5;      // along the segment from its proximal joint
  double gyration_frac = 0.3; // about the COM, fraction of segment length
};

struct SegmentModel {
  std::array<SegmentInertia, kMassSegmentCount> segments{};

  const SegmentInertia& operator[](MassSegment s) const { return segments[static_cast<std::size_t>(s)]; }
  SegmentInertia& operator[](MassSegment s) { return segments[static_cast<std::size_t>(s)]; }

  static SegmentModel defaults();
  /// JSON map segment -> {mass_frac, com_frac, gyration_frac}; omitted segments keep defaults.
  static SegmentModel from_json(std::string_view text);
  void validate() const;
};

struct JointTorqueFrame {
  std::int64_t t_ms = 0;
  DofVector torques{};

  double torque(DofId d) const { return torques[index(d)]; }
};

/// Quasi-static gravity load of the distal chain plus a single-DOF inertial
/// term. Torques are the actuation required to produce the motion (holding a
/// horizontal arm gives +m g d on shoulder flexion).
JointTorqueFrame inverse_dynamics(const JointAngleFrame& q, double mass_kg, const BodyScale& scale,
                                  const SegmentModel& seg);

} // namespace musclework
