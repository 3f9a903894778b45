#include "musclework/synth.hpp"

#include "musclework/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace musclework {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double deg(double d) { return d * kPi / 180.0; }

constexpr std::array<std::string_view, kExerciseCount> kExerciseNames = {
    "arm-circles", "lunges", "shoulder-squeeze", "squats-arms", "squats-no-arms",
};

// Raised cosine over one rep: 0 at the rep boundaries, 1 at mid-rep.
double bump(double t_s, double cadence_hz) {
  const double u = t_s * cadence_hz - std::floor(t_s * cadence_hz);
  return 0.5 * (1.0 - std::cos(2.0 * kPi * u));
}

double lerp(double a, double b, double w) { return a + (b - a) * w; }

void set(DofVector& q, Side s, DofKind k, double v) { q[index(dof(s, k))] = v; }

void squat_legs(DofVector& q, double w) {
  for (Side s : {Side::Left, Side::Right}) {
    set(q, s, DofKind::HipFlexion, deg(80.0) * w);
    set(q, s, DofKind::KneeFlexion, deg(90.0) * w);
    set(q, s, DofKind::AnkleFlexion, deg(25.0) * w);
  }
}

void clamp_to_ranges(DofVector& q) {
  const JointRanges r = JointRanges::defaults();
  for (Side s : {Side::Left, Side::Right}) {
    auto clamp_swing = [&](DofKind fk, DofKind ak, double max) {
      double& f = q[index(dof(s, fk))];
      double& a = q[index(dof(s, ak))];
      const double n = std::hypot(f, a);
      if (n > max) {
        f *= max / n;
        a *= max / n;
      }
    };
    clamp_swing(DofKind::ShoulderFlexion, DofKind::ShoulderAbduction, r.shoulder_swing_max);
    clamp_swing(DofKind::HipFlexion, DofKind::HipAbduction, r.hip_swing_max);
    for (DofKind k : {DofKind::ElbowFlexion, DofKind::KneeFlexion}) {
      double& v = q[index(dof(s, k))];
      v = std::clamp(v, r.hinge_min, r.hinge_max);
    }
    double& ank = q[index(dof(s, DofKind::AnkleFlexion))];
    ank = std::clamp(ank, -r.ankle_abs_max, r.ankle_abs_max);
  }
  double& trunk = q[index(DofId::TrunkFlexion)];
  trunk = std::clamp(trunk, r.trunk_min, r.trunk_max);
}

} // namespace

std::string_view exercise_name(ExerciseKind k) { return kExerciseNames[static_cast<std::size_t>(k)]; }

std::optional<ExerciseKind> exercise_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kExerciseCount; ++i) {
    if (kExerciseNames[i] == name) return static_cast<ExerciseKind>(i);
  }
  return std::nullopt;
}

void MotionParams::validate() const {
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  if (!(cadence_hz > 0.0)) throw InvalidArgument("cadence must be positive");
  if (!(noise_deg >= 0.0)) throw InvalidArgument("noise must be >= 0");
  if (!(stature_factor > 0.0)) throw InvalidArgument("stature factor must be positive");
  if (!(rate_hz > 0.0)) throw InvalidArgument("rate must be positive");
}

JointRanges JointRanges::defaults() {
  return {deg(175.0), deg(150.0), deg(-30.0), deg(170.0), deg(70.0), deg(-60.0), deg(120.0)};
}

SkeletonFrame forward_kinematics(const JointAngleFrame& angles, const BodyScale& scale, const Vec3& root) {
  const JointRanges r = JointRanges::defaults();
  const DofVector& q = angles.angles;
  auto check = [](bool ok, DofId d) {
    if (!ok) throw AngleOutOfRange(std::string("angle out of range: ") + std::string(dof_name(d)));
  };
  for (double v : q) {
    if (!std::isfinite(v)) throw AngleOutOfRange("non-finite joint angle");
  }
  for (Side s : {Side::Left, Side::Right}) {
    auto at = [&](DofKind k) { return q[index(dof(s, k))]; };
    check(std::hypot(at(DofKind::ShoulderFlexion), at(DofKind::ShoulderAbduction)) <= r.shoulder_swing_max + 1e-12,
          dof(s, DofKind::ShoulderFlexion));
    check(std::hypot(at(DofKind::HipFlexion), at(DofKind::HipAbduction)) <= r.hip_swing_max + 1e-12,
          dof(s, DofKind::HipFlexion));
    for (DofKind k : {DofKind::ElbowFlexion, DofKind::KneeFlexion}) {
      check(at(k) >= r.hinge_min && at(k) <= r.hinge_max, dof(s, k));
    }
    check(std::abs(at(DofKind::AnkleFlexion)) <= r.ankle_abs_max, dof(s, DofKind::AnkleFlexion));
  }
  check(q[index(DofId::TrunkFlexion)] >= r.trunk_min && q[index(DofId::TrunkFlexion)] <= r.trunk_max,
        DofId::TrunkFlexion);

  const Pose pose = forward_pose(q, scale, root);
  SkeletonFrame f;
  f.t_ms = angles.t_ms;
  f.positions = pose.joints;
  return f;
}

DofVector exercise_angles(ExerciseKind kind, double t, const MotionParams& p) {
  DofVector q{};
  const double w = bump(t, p.cadence_hz);
  switch (kind) {
  case ExerciseKind::SquatsNoArms: squat_legs(q, w); break;
  case ExerciseKind::SquatsArms:
    squat_legs(q, w);
    set(q, Side::Left, DofKind::ShoulderFlexion, deg(90.0));
    set(q, Side::Right, DofKind::ShoulderFlexion, deg(90.0));
    break;
  case ExerciseKind::Lunges: {
    const Side front = p.mirror ? Side::Left : Side::Right;
    const Side rear = p.mirror ? Side::Right : Side::Left;
    set(q, front, DofKind::HipFlexion, lerp(deg(15.0), deg(80.0), w));
    set(q, front, DofKind::KneeFlexion, lerp(deg(20.0), deg(90.0), w));
    set(q, front, DofKind::AnkleFlexion, lerp(deg(5.0), deg(20.0), w));
    set(q, rear, DofKind::HipFlexion, deg(-20.0));
    set(q, rear, DofKind::KneeFlexion, lerp(deg(20.0), deg(45.0), w));
    set(q, rear, DofKind::AnkleFlexion, deg(-10.0));
    break;
  }
  case ExerciseKind::ArmCircles: {
    const double osc = deg(15.0) * std::sin(2.0 * kPi * 4.0 * p.cadence_hz * t);
    for (Side s : {Side::Left, Side::Right}) {
      set(q, s, DofKind::ShoulderAbduction, deg(90.0));
      set(q, s, DofKind::ShoulderFlexion, osc);
    }
    break;
  }
  case ExerciseKind::ShoulderSqueeze:
    for (Side s : {Side::Left, Side::Right}) {
      set(q, s, DofKind::ShoulderFlexion, deg(170.0));
      set(q, s, DofKind::ElbowFlexion, deg(90.0) * w);
    }
    break;
  }
  return q;
}

SessionStream generate(ExerciseKind kind, const MotionParams& p) {
  p.validate();
  const BodyScale scale = BodyScale::reference().scaled(p.stature_factor);
  const auto n = static_cast<std::size_t>(std::llround(p.reps / p.cadence_hz * p.rate_hz));
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> noise(0.0, deg(p.noise_deg));

  SessionStream s;
  s.rate_hz = p.rate_hz;
  s.t0_ms = 0.0;
  s.frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / p.rate_hz;
    JointAngleFrame q;
    q.t_ms = std::llround(t * 1000.0);
    q.angles = exercise_angles(kind, t, p);
    if (p.noise_deg > 0.0) {
      for (double& v : q.angles) v += noise(rng);
      clamp_to_ranges(q.angles);
    }
    SkeletonFrame f = forward_kinematics(q, scale);
    double ground = f[JointId::AnkleL].y();
    for (JointId j : {JointId::AnkleR, JointId::FootL, JointId::FootR}) ground = std::min(ground, f[j].y());
    for (Vec3& v : f.positions) v.y() -= ground;
    s.frames.push_back(f);
  }
  return s;
}

} // namespace musclework
