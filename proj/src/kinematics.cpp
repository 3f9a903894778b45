#include "musclework/kinematics.hpp"

#include "musclework/error.hpp"

#include <Eigen/Geometry>
#include <json.hpp>

#include <cmath>
#include <numbers>

namespace musclework {

namespace {

constexpr std::array<std::string_view, kDofCount> kDofNames = {
    "shoulder_flexion_l", "shoulder_abduction_l", "elbow_flexion_l", "hip_flexion_l", "hip_abduction_l",
    "knee_flexion_l",     "ankle_flexion_l",      "shoulder_flexion_r", "shoulder_abduction_r", "elbow_flexion_r",
    "hip_flexion_r",      "hip_abduction_r",      "knee_flexion_r",  "ankle_flexion_r",   "trunk_flexion",
};


const std::array<std::string_view, kSegmentCount>& segment_names() {
  static const std::array<std::string_view, kSegmentCount> names = {
      "pelvis",  "trunk",   "shoulder_l", "upper_arm_l", "forearm_l", "thigh_l", "shank_l",
      "foot_l",  "shoulder_r", "upper_arm_r", "forearm_r", "thigh_r", "shank_r", "foot_r",
  };
  return names;
}

constexpr double kHipDropRad = std::numbers::pi / 6.0; // pelvis->hip bone points 30 deg below lateral
const Vec3 kClavicleDir = Vec3(0.6, 0.8, 0.0);
constexpr double kFdStep = 1e-5;

double sign(Side s) { return s == Side::Left ? 1.0 : -1.0; }

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

/// Rotation by the swing vector (axis * angle), identity near zero.
Mat3 swing_rotation(const Vec3& s) {
  const double angle = s.norm();
  if (angle < 1e-300) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, s / angle).toRotationMatrix();
}

Vec3 swing_vector(double flexion, double abduction, Side side) { return Vec3(-flexion, 0.0, sign(side) * abduction); }

/// Inverse of swing_rotation applied to (0,-1,0): returns {flexion, abduction}.
std::pair<double, double> swing_angles(const Vec3& dir_local, Side side) {
  const double dx = dir_local.x(), dy = dir_local.y(), dz = dir_local.z();
  const double horiz = std::hypot(dx, dz);
  const double phi = std::atan2(horiz, -dy);
  const double ratio = horiz > 1e-12 ? phi / horiz : 1.0;
  return {ratio * dz, sign(side) * ratio * dx};
}

struct ArmIds {
  JointId clav, shoulder, elbow, wrist;
  SegmentId girdle, upper, fore;
};
struct LegIds {
  JointId hip, knee, ankle, foot;
  SegmentId thigh, shank, foot_seg;
};

ArmIds arm_ids(Side s) {
  if (s == Side::Left) {
    return {JointId::ClavicleL, JointId::ShoulderL, JointId::ElbowL, JointId::WristL,
            SegmentId::ShoulderL, SegmentId::UpperArmL, SegmentId::ForearmL};
  }
  return {JointId::ClavicleR, JointId::ShoulderR, JointId::ElbowR, JointId::WristR,
          SegmentId::ShoulderR, SegmentId::UpperArmR, SegmentId::ForearmR};
}

LegIds leg_ids(Side s) {
  if (s == Side::Left) {
    return {JointId::HipL, JointId::KneeL, JointId::AnkleL, JointId::FootL, SegmentId::ThighL, SegmentId::ShankL, SegmentId::FootL};
  }
  return {JointId::HipR, JointId::KneeR, JointId::AnkleR, JointId::FootR, SegmentId::ThighR, SegmentId::ShankR, SegmentId::FootR};
}

Vec3 unit(const Vec3& v, std::string_view what) {
  const double n = v.norm();
  if (n < 1e-6) throw DegeneratePose(std::string(what) + " joints coincide");
  return v / n;
}

struct MassItem {
  MassSegment kind;
  JointId proximal;
  JointId distal;
};

// Order: trunk, then per side upper arm, forearm, thigh, shank, foot.
const std::array<MassItem, 11>& mass_items() {
  static const std::array<MassItem, 11> items = {{
      {MassSegment::Trunk, JointId::Pelvis, JointId::Neck},
      {MassSegment::UpperArm, JointId::ShoulderL, JointId::ElbowL},
      {MassSegment::Forearm, JointId::ElbowL, JointId::WristL},
      {MassSegment::Thigh, JointId::HipL, JointId::KneeL},
      {MassSegment::Shank, JointId::KneeL, JointId::AnkleL},
      {MassSegment::Foot, JointId::AnkleL, JointId::FootL},
      {MassSegment::UpperArm, JointId::ShoulderR, JointId::ElbowR},
      {MassSegment::Forearm, JointId::ElbowR, JointId::WristR},
      {MassSegment::Thigh, JointId::HipR, JointId::KneeR},
      {MassSegment::Shank, JointId::KneeR, JointId::AnkleR},
      {MassSegment::Foot, JointId::AnkleR, JointId::FootR},
  }};
  return items;
}

/// Mass items moved by each DOF (indices into mass_items()).
std::vector<std::size_t> distal_items(DofId d) {
  if (d == DofId::TrunkFlexion) return {0, 1, 2, 6, 7};
  const auto i = index(d);
  const std::size_t base = i < 7 ? 1 : 6;
  switch (static_cast<DofKind>(i % 7)) {
  case DofKind::ShoulderFlexion:
  case DofKind::ShoulderAbduction: return {base, base + 1};
  case DofKind::ElbowFlexion: return {base + 1};
  case DofKind::HipFlexion:
  case DofKind::HipAbduction: return {base + 2, base + 3, base + 4};
  case DofKind::KneeFlexion: return {base + 3, base + 4};
  case DofKind::AnkleFlexion: return {base + 4};
  }
  return {};
}

Vec3 item_com(const MassItem& item, const Pose& p, const SegmentModel& seg) {
  const Vec3& a = p.joint(item.proximal);
  const Vec3& b = p.joint(item.distal);
  return a + seg[item.kind].com_frac * (b - a);
}

} // namespace

std::string_view dof_name(DofId d) { return kDofNames[index(d)]; }

std::optional<DofId> dof_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kDofCount; ++i) {
    if (kDofNames[i] == name) return static_cast<DofId>(i);
  }
  return std::nullopt;
}

std::string_view segment_name(SegmentId s) { return segment_names()[index(s)]; }

std::optional<SegmentId> segment_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kSegmentCount; ++i) {
    if (segment_names()[i] == name) return static_cast<SegmentId>(i);
  }
  return std::nullopt;
}

Pose forward_pose(const DofVector& q, const BodyScale& scale, const Vec3& root, const Mat3& heading) {
  static const BodyScale ref = BodyScale::reference();
  const auto ratio = [&](JointId child) { return scale.length(child) / ref.length(child); };
  const Vec3 ey = Vec3::UnitY();

  Pose p;
  auto& J = p.joints;
  auto at = [&J](JointId j) -> Vec3& { return J[index(j)]; };

  const Mat3 trunk = heading * rot_x(q[index(DofId::TrunkFlexion)]);
  at(JointId::Pelvis) = root;
  at(JointId::SpineNavel) = root + scale.length(JointId::SpineNavel) * (trunk * ey);
  at(JointId::SpineChest) = at(JointId::SpineNavel) + scale.length(JointId::SpineChest) * (trunk * ey);
  at(JointId::Neck) = at(JointId::SpineChest) + scale.length(JointId::Neck) * (trunk * ey);
  at(JointId::Head) = at(JointId::Neck) + scale.length(JointId::Head) * (trunk * ey);

  const double trunk_ratio = (scale.length(JointId::SpineNavel) + scale.length(JointId::SpineChest)) /
                             (ref.length(JointId::SpineNavel) + ref.length(JointId::SpineChest));
  const double pelvis_ratio = 0.5 * (ratio(JointId::HipL) + ratio(JointId::HipR));
  p.segments[index(SegmentId::Pelvis)] = {heading, root, pelvis_ratio};
  p.segments[index(SegmentId::Trunk)] = {trunk, root, trunk_ratio};

  for (Side side : {Side::Left, Side::Right}) {
    const double sg = sign(side);
    const ArmIds a = arm_ids(side);
    const Vec3 clav_dir(sg * kClavicleDir.x(), kClavicleDir.y(), 0.0);
    at(a.clav) = at(JointId::SpineChest) + scale.length(a.clav) * (trunk * clav_dir);
    at(a.shoulder) = at(a.clav) + scale.length(a.shoulder) * (trunk * Vec3(sg, 0.0, 0.0));
    const Mat3 upper =
        trunk * swing_rotation(swing_vector(q[index(dof(side, DofKind::ShoulderFlexion))],
                                            q[index(dof(side, DofKind::ShoulderAbduction))], side));
    const Mat3 fore = upper * rot_x(-q[index(dof(side, DofKind::ElbowFlexion))]);
    at(a.elbow) = at(a.shoulder) - scale.length(a.elbow) * (upper * ey);
    at(a.wrist) = at(a.elbow) - scale.length(a.wrist) * (fore * ey);
    p.segments[index(a.girdle)] = {trunk, at(a.shoulder), trunk_ratio};
    p.segments[index(a.upper)] = {upper, at(a.shoulder), ratio(a.elbow)};
    p.segments[index(a.fore)] = {fore, at(a.elbow), ratio(a.wrist)};

    const LegIds l = leg_ids(side);
    const Vec3 hip_dir(sg * std::cos(kHipDropRad), -std::sin(kHipDropRad), 0.0);
    at(l.hip) = root + scale.length(l.hip) * (heading * hip_dir);
    const Mat3 thigh = heading * swing_rotation(swing_vector(q[index(dof(side, DofKind::HipFlexion))],
                                                             q[index(dof(side, DofKind::HipAbduction))], side));
    const Mat3 shank = thigh * rot_x(q[index(dof(side, DofKind::KneeFlexion))]);
    const Mat3 foot = shank * rot_x(-q[index(dof(side, DofKind::AnkleFlexion))]);
    at(l.knee) = at(l.hip) - scale.length(l.knee) * (thigh * ey);
    at(l.ankle) = at(l.knee) - scale.length(l.ankle) * (shank * ey);
    at(l.foot) = at(l.ankle) + scale.length(l.foot) * (foot * Vec3::UnitZ());
    p.segments[index(l.thigh)] = {thigh, at(l.hip), ratio(l.knee)};
    p.segments[index(l.shank)] = {shank, at(l.knee), ratio(l.ankle)};
    p.segments[index(l.foot_seg)] = {foot, at(l.ankle), ratio(l.foot)};
  }
  return p;
}

JointAngleFrame compute_joint_angles(const SkeletonFrame& f) {
  for (const Bone& b : bones()) {
    if ((f[b.child] - f[b.parent]).norm() < 1e-6) {
      throw DegeneratePose(std::string(joint_name(b.parent)) + " and " + std::string(joint_name(b.child)) +
                           " coincide");
    }
  }
  JointAngleFrame out;
  out.t_ms = f.t_ms;

  const Vec3 up = Vec3::UnitY();
  Vec3 lateral = f[JointId::HipL] - f[JointId::HipR];
  lateral -= lateral.dot(up) * up;
  lateral = unit(lateral, "hip");
  Mat3 heading;
  heading.col(0) = lateral;
  heading.col(1) = up;
  heading.col(2) = lateral.cross(up);

  const Vec3 trunk_vec = heading.transpose() * (f[JointId::SpineChest] - f[JointId::Pelvis]);
  const double trunk_flexion = std::atan2(trunk_vec.z(), trunk_vec.y());
  out.angle(DofId::TrunkFlexion) = trunk_flexion;
  const Mat3 trunk = heading * rot_x(trunk_flexion);

  for (Side side : {Side::Left, Side::Right}) {
    const ArmIds a = arm_ids(side);
    const Vec3 upper_dir = trunk.transpose() * unit(f[a.elbow] - f[a.shoulder], "shoulder/elbow");
    const auto [sf, sa] = swing_angles(upper_dir, side);
    out.angle(dof(side, DofKind::ShoulderFlexion)) = sf;
    out.angle(dof(side, DofKind::ShoulderAbduction)) = sa;
    const Mat3 upper = trunk * swing_rotation(swing_vector(sf, sa, side));
    const Vec3 fore_dir = upper.transpose() * unit(f[a.wrist] - f[a.elbow], "elbow/wrist");
    out.angle(dof(side, DofKind::ElbowFlexion)) = std::atan2(fore_dir.z(), -fore_dir.y());

    const LegIds l = leg_ids(side);
    const Vec3 thigh_dir = heading.transpose() * unit(f[l.knee] - f[l.hip], "hip/knee");
    const auto [hf, ha] = swing_angles(thigh_dir, side);
    out.angle(dof(side, DofKind::HipFlexion)) = hf;
    out.angle(dof(side, DofKind::HipAbduction)) = ha;
    const Mat3 thigh = heading * swing_rotation(swing_vector(hf, ha, side));
    const Vec3 shank_dir = thigh.transpose() * unit(f[l.ankle] - f[l.knee], "knee/ankle");
    const double knee = std::atan2(-shank_dir.z(), -shank_dir.y());
    out.angle(dof(side, DofKind::KneeFlexion)) = knee;
    const Mat3 shank = thigh * rot_x(knee);
    const Vec3 foot_dir = shank.transpose() * unit(f[l.foot] - f[l.ankle], "ankle/foot");
    out.angle(dof(side, DofKind::AnkleFlexion)) = std::atan2(foot_dir.y(), foot_dir.z());
  }
  return out;
}

void differentiate(std::vector<JointAngleFrame>& frames, double dt_s) {
  const std::size_t n = frames.size();
  if (n < 3) throw TooFewFrames(n, 3);
  if (!(dt_s > 0.0)) throw InvalidArgument("dt must be positive");
  const double two_pi = 2.0 * std::numbers::pi;
  auto wrap = [two_pi](double d) { return std::remainder(d, two_pi); };
  for (std::size_t j = 0; j < kDofCount; ++j) {
    frames[0].velocities[j] = wrap(frames[1].angles[j] - frames[0].angles[j]) / dt_s;
    frames[n - 1].velocities[j] = wrap(frames[n - 1].angles[j] - frames[n - 2].angles[j]) / dt_s;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      frames[i].velocities[j] = wrap(frames[i + 1].angles[j] - frames[i - 1].angles[j]) / (2.0 * dt_s);
    }
    frames[0].accelerations[j] = (frames[1].velocities[j] - frames[0].velocities[j]) / dt_s;
    frames[n - 1].accelerations[j] = (frames[n - 1].velocities[j] - frames[n - 2].velocities[j]) / dt_s;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      frames[i].accelerations[j] = (frames[i + 1].velocities[j] - frames[i - 1].velocities[j]) / (2.0 * dt_s);
    }
  }
}

SegmentModel SegmentModel::defaults() {
  SegmentModel m;
  m[MassSegment::Trunk] = {0.497, 0.50, 0.30};
  m[MassSegment::UpperArm] = {0.028, 0.436, 0.322};
  m[MassSegment::Forearm] = {0.022, 0.682, 0.468};
  m[MassSegment::Thigh] = {0.100, 0.433, 0.323};
  m[MassSegment::Shank] = {0.0465, 0.433, 0.302};
  m[MassSegment::Foot] = {0.0145, 0.50, 0.475};
  return m;
}

SegmentModel SegmentModel::from_json(std::string_view text) {
  static constexpr std::array<std::string_view, kMassSegmentCount> keys = {"trunk", "upper_arm", "forearm",
                                                                          "thigh", "shank",     "foot"};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("segment model: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("segment model: top level must be an object");
  SegmentModel m = defaults();
  for (const auto& [key, value] : doc.items()) {
    std::size_t k = 0;
    while (k < keys.size() && keys[k] != key) ++k;
    if (k == keys.size()) throw SchemaError("segment model: unknown segment '" + key + "'");
    auto& s = m.segments[k];
    try {
      s.mass_frac = value.value("mass_frac", s.mass_frac);
      s.com_frac = value.value("com_frac", s.com_frac);
      s.gyration_frac = value.value("gyration_frac", s.gyration_frac);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("segment model: " + key + ": " + e.what());
    }
  }
  m.validate();
  return m;
}

void SegmentModel::validate() const {
  double total = 0.0;
  for (std::size_t k = 0; k < kMassSegmentCount; ++k) {
    const auto& s = segments[k];
    for (double v : {s.mass_frac, s.com_frac, s.gyration_frac}) {
      if (!(v > 0.0 && v < 1.0)) throw SchemaError("segment model: fractions must lie in (0,1)");
    }
    total += k == 0 ? s.mass_frac : 2.0 * s.mass_frac;
  }
  if (total > 1.0 + 1e-12) throw SchemaError("segment model: mass fractions sum above 1");
}

JointTorqueFrame inverse_dynamics(const JointAngleFrame& q, double mass_kg, const BodyScale& scale,
                                  const SegmentModel& seg) {
  if (!(mass_kg > 0.0)) throw InvalidArgument("subject mass must be positive");
  JointTorqueFrame out;
  out.t_ms = q.t_ms;
  const auto& items = mass_items();

  for (std::size_t j = 0; j < kDofCount; ++j) {
    const auto distal = distal_items(static_cast<DofId>(j));
    double chain_mass = 0.0;
    for (std::size_t k : distal) chain_mass += seg[items[k].kind].mass_frac;
    if (chain_mass == 0.0) continue;

    DofVector plus = q.angles, minus = q.angles;
    plus[j] += kFdStep;
    minus[j] -= kFdStep;
    const Pose pp = forward_pose(plus, scale);
    const Pose pm = forward_pose(minus, scale);

    double dV = 0.0;
    double inertia = 0.0;
    for (std::size_t k : distal) {
      const MassItem& item = items[k];
      const double m = mass_kg * seg[item.kind].mass_frac;
      const Vec3 dc = (item_com(item, pp, seg) - item_com(item, pm, seg)) / (2.0 * kFdStep);
      const double len = (pp.joint(item.distal) - pp.joint(item.proximal)).norm();
      const double gyr = seg[item.kind].gyration_frac * len;
      dV += m * kGravity * dc.y();
      inertia += m * (dc.squaredNorm() + gyr * gyr);
    }
    out.torques[j] = dV + inertia * q.accelerations[j];
  }
  return out;
}

} // namespace musclework
