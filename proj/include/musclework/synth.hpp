#pragma once

#include "musclework/kinematics.hpp"
#include "musclework/skeleton.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace musclework {

enum class ExerciseKind : int { ArmCircles = 0, Lunges, ShoulderSqueeze, SquatsArms, SquatsNoArms };
inline constexpr std::size_t kExerciseCount = 5;

std::string_view exercise_name(ExerciseKind k); // kebab-case, e.g. "squats-no-arms"
std::optional<ExerciseKind> exercise_from_name(std::string_view name);

struct MotionParams {
  int reps = 5;
  double cadence_hz = 0.5;
  double noise_deg = 0.0;
  std::uint64_t seed = 0;
  double stature_factor = 1.0; // multiplies the reference body
  double rate_hz = 60.0;
  bool mirror = false; // lunges: left leg forward instead of right

  void validate() const;
};

/// Joint ranges accepted by forward_kinematics (radians).
struct JointRanges {
  double shoulder_swing_max;
  double hip_swing_max;
  double hinge_min, hinge_max; // elbow and knee flexion
  double ankle_abs_max;
  double trunk_min, trunk_max;
  static JointRanges defaults();
};

/// Places the 21 canonical joints for the given angles with the pelvis at
/// `root`, facing +z. Throws AngleOutOfRange outside JointRanges::defaults().
SkeletonFrame forward_kinematics(const JointAngleFrame& angles, const BodyScale& scale,
                                 const Vec3& root = Vec3(0.0, 1.0, 0.0));

/// Noise-free joint angles of the exercise at time t (seconds).
DofVector exercise_angles(ExerciseKind kind, double t_s, const MotionParams& p);

/// Deterministic uniform stream of `reps` cycles. Each frame is translated
/// vertically so the lowest foot joint touches y = 0.
SessionStream generate(ExerciseKind kind, const MotionParams& p);

} // namespace musclework
