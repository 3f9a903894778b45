#include "support.hpp"

#include "musclework/error.hpp"
#include "musclework/kinematics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace musclework;
using mwtest::standing_frame;

namespace {

constexpr double kPi = std::numbers::pi;

JointAngleFrame angles_with(DofId d, double v) {
  JointAngleFrame q;
  q.angle(d) = v;
  return q;
}

std::vector<JointAngleFrame> series(double (*theta)(double), std::size_t n, double dt) {
  std::vector<JointAngleFrame> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].angle(DofId::KneeFlexionL) = theta(static_cast<double>(i) * dt);
  }
  return out;
}

} // namespace

TEST(DofNames, RoundTrip) {
  for (std::size_t i = 0; i < kDofCount; ++i) {
    const auto d = static_cast<DofId>(i);
    EXPECT_EQ(dof_from_name(dof_name(d)), d);
  }
  EXPECT_EQ(dof_name(DofId::KneeFlexionL), "knee_flexion_l");
  EXPECT_EQ(dof_name(DofId::TrunkFlexion), "trunk_flexion");
  EXPECT_EQ(dof(Side::Right, DofKind::HipAbduction), DofId::HipAbductionR);
}

TEST(JointAngles, NeutralStandingIsZero) {
  const JointAngleFrame q = compute_joint_angles(standing_frame());
  for (double a : q.angles) EXPECT_NEAR(a, 0.0, 1e-9);
}

TEST(JointAngles, RightAngleElbow) {
  SkeletonFrame f = standing_frame();
  // forearm pointing forward from a hanging upper arm
  const double fore = (f[JointId::WristL] - f[JointId::ElbowL]).norm();
  f[JointId::WristL] = f[JointId::ElbowL] + Vec3(0.0, 0.0, fore);
  const JointAngleFrame q = compute_joint_angles(f);
  EXPECT_NEAR(q.angle(DofId::ElbowFlexionL), kPi / 2, 1e-9);
  EXPECT_NEAR(q.angle(DofId::ShoulderFlexionL), 0.0, 1e-9);
}

TEST(JointAngles, DegeneratePose) {
  SkeletonFrame f = standing_frame();
  f[JointId::ElbowR] = f[JointId::ShoulderR];
  EXPECT_THROW(compute_joint_angles(f), DegeneratePose);
}

TEST(JointAngles, ForwardFlexedArmPointsForward) {
  const Pose p = forward_pose(angles_with(DofId::ShoulderFlexionL, kPi / 2).angles, BodyScale::reference());
  const Vec3 dir = (p.joint(JointId::ElbowL) - p.joint(JointId::ShoulderL)).normalized();
  EXPECT_NEAR(dir.z(), 1.0, 1e-12);
  const Pose a = forward_pose(angles_with(DofId::ShoulderAbductionL, kPi / 2).angles, BodyScale::reference());
  const Vec3 side = (a.joint(JointId::ElbowL) - a.joint(JointId::ShoulderL)).normalized();
  EXPECT_NEAR(side.x(), 1.0, 1e-12);
  const Pose r = forward_pose(angles_with(DofId::ShoulderAbductionR, kPi / 2).angles, BodyScale::reference());
  EXPECT_NEAR((r.joint(JointId::ElbowR) - r.joint(JointId::ShoulderR)).normalized().x(), -1.0, 1e-12);
}

TEST(JointAngles, KneeFlexesBackward) {
  const Pose p = forward_pose(angles_with(DofId::KneeFlexionR, kPi / 2).angles, BodyScale::reference());
  const Vec3 dir = (p.joint(JointId::AnkleR) - p.joint(JointId::KneeR)).normalized();
  EXPECT_NEAR(dir.z(), -1.0, 1e-12);
}

TEST(Differentiate, ConstantAngles) {
  auto q = series([](double) { return 0.7; }, 20, 1.0 / 60);
  differentiate(q, 1.0 / 60);
  for (const auto& f : q) {
    EXPECT_EQ(f.velocities[index(DofId::KneeFlexionL)], 0.0);
    EXPECT_EQ(f.accelerations[index(DofId::KneeFlexionL)], 0.0);
  }
}

TEST(Differentiate, LinearExactInside) {
  auto q = series([](double t) { return 2.0 * t; }, 61, 1.0 / 60);
  differentiate(q, 1.0 / 60);
  for (std::size_t i = 1; i + 1 < q.size(); ++i) EXPECT_NEAR(q[i].velocities[index(DofId::KneeFlexionL)], 2.0, 1e-9);
}

TEST(Differentiate, SineTruncationError) {
  // Central difference of sin(w t) gives w cos(w t) sin(x)/x with x = w dt.
  const double dt = 1.0 / 60, w = 2 * kPi;
  auto q = series([](double t) { return std::sin(2 * kPi * t); }, 121, dt);
  differentiate(q, dt);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    const double t = static_cast<double>(i) * dt;
    worst = std::max(worst, std::abs(q[i].velocities[index(DofId::KneeFlexionL)] - w * std::cos(w * t)));
  }
  const double x = w * dt;
  const double bound = w * (1.0 - std::sin(x) / x);
  EXPECT_LE(worst, bound + 1e-9);
  EXPECT_NEAR(worst, bound, 1e-6);
  EXPECT_LT(worst, 0.012);
}

TEST(Differentiate, WrapsAngleJumps) {
  std::vector<JointAngleFrame> q(3);
  q[0].angle(DofId::TrunkFlexion) = kPi - 0.01;
  q[1].angle(DofId::TrunkFlexion) = -kPi + 0.01;
  q[2].angle(DofId::TrunkFlexion) = -kPi + 0.03;
  differentiate(q, 0.01);
  EXPECT_NEAR(q[1].velocities[index(DofId::TrunkFlexion)], 2.0, 1e-9);
}

TEST(Differentiate, TooFewFrames) {
  std::vector<JointAngleFrame> q(2);
  EXPECT_THROW(differentiate(q, 0.01), TooFewFrames);
}

TEST(InverseDynamics, HangingArmNoShoulderTorque) {
  const JointTorqueFrame t = inverse_dynamics(JointAngleFrame{}, 70.0, BodyScale::reference(), SegmentModel::defaults());
  EXPECT_NEAR(t.torque(DofId::ShoulderFlexionL), 0.0, 1e-9);
  EXPECT_NEAR(t.torque(DofId::ShoulderFlexionR), 0.0, 1e-9);
  EXPECT_NEAR(t.torque(DofId::ElbowFlexionL), 0.0, 1e-9);
}

TEST(InverseDynamics, HorizontalArmLever) {
  const double mass = 80.0;
  const BodyScale s = BodyScale::reference();
  const SegmentModel seg = SegmentModel::defaults();
  const JointTorqueFrame t = inverse_dynamics(angles_with(DofId::ShoulderFlexionL, kPi / 2), mass, s, seg);
  const double lu = s.length(JointId::ElbowL), lf = s.length(JointId::WristL);
  const double mu = mass * seg[MassSegment::UpperArm].mass_frac, mf = mass * seg[MassSegment::Forearm].mass_frac;
  const double du = seg[MassSegment::UpperArm].com_frac * lu;
  const double df = lu + seg[MassSegment::Forearm].com_frac * lf;
  const double expected = kGravity * (mu * du + mf * df);
  EXPECT_NEAR(t.torque(DofId::ShoulderFlexionL), expected, 1e-6 * expected);
  EXPECT_NEAR(t.torque(DofId::ShoulderFlexionR), 0.0, 1e-9);
}

TEST(InverseDynamics, ForearmHorizontalAtElbow) {
  const double mass = 60.0;
  const BodyScale s = BodyScale::reference();
  const SegmentModel seg = SegmentModel::defaults();
  const JointTorqueFrame t = inverse_dynamics(angles_with(DofId::ElbowFlexionR, kPi / 2), mass, s, seg);
  const double expected =
      kGravity * mass * seg[MassSegment::Forearm].mass_frac * seg[MassSegment::Forearm].com_frac * s.length(JointId::WristR);
  EXPECT_NEAR(t.torque(DofId::ElbowFlexionR), expected, 1e-6 * expected);
}

TEST(InverseDynamics, InertialTermAddsToStaticLoad) {
  JointAngleFrame q;
  q.accelerations[index(DofId::ElbowFlexionL)] = 3.0;
  const BodyScale s = BodyScale::reference();
  const SegmentModel seg = SegmentModel::defaults();
  const JointTorqueFrame t = inverse_dynamics(q, 70.0, s, seg);
  const double m = 70.0 * seg[MassSegment::Forearm].mass_frac;
  const double l = s.length(JointId::WristL);
  const double d = seg[MassSegment::Forearm].com_frac * l, k = seg[MassSegment::Forearm].gyration_frac * l;
  EXPECT_NEAR(t.torque(DofId::ElbowFlexionL), m * (d * d + k * k) * 3.0, 1e-6);
}

TEST(InverseDynamics, RejectsNonPositiveMass) {
  EXPECT_THROW(inverse_dynamics(JointAngleFrame{}, 0.0, BodyScale::reference(), SegmentModel::defaults()),
               InvalidArgument);
}

TEST(SegmentModelFile, OverridesAndValidation) {
  const SegmentModel m = SegmentModel::from_json(R"({"forearm": {"mass_frac": 0.03}})");
  EXPECT_EQ(m[MassSegment::Forearm].mass_frac, 0.03);
  EXPECT_EQ(m[MassSegment::Forearm].com_frac, SegmentModel::defaults()[MassSegment::Forearm].com_frac);
  EXPECT_THROW(SegmentModel::from_json(R"({"tail": {}})"), SchemaError);
  EXPECT_THROW(SegmentModel::from_json(R"({"trunk": {"mass_frac": 0.9}})"), SchemaError);
  EXPECT_THROW(SegmentModel::from_json("[1"), SchemaError);
}

TEST(ForwardPose, ScaleFollowsSubject) {
  const BodyScale big = BodyScale::reference().scaled(1.2);
  const Pose p = forward_pose(JointAngleFrame{}.angles, big);
  EXPECT_NEAR(p.segment(SegmentId::ForearmL).scale, 1.2, 1e-12);
  EXPECT_NEAR((p.joint(JointId::WristL) - p.joint(JointId::ElbowL)).norm(), big.length(JointId::WristL), 1e-12);
}
