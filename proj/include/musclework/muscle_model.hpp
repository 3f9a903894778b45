#pragma once

#include "musclework/kinematics.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace musclework {

/// Prime-mover groups visualised on the avatar.
enum class MuscleGroup : int {
  Deltoideus = 0,
  PectoralisMajor,
  TricepsBrachii,
  BicepsBrachiiBrachialis,
  LatissimusDorsi,
  GluteusMaximus,
  Ischiocrurales,
  QuadricepsFemoris,
};
inline constexpr std::size_t kMuscleGroupCount = 8;

std::string_view group_name(MuscleGroup g); // "deltoideus", ...
std::optional<MuscleGroup> group_from_name(std::string_view name);
bool is_upper_limb(MuscleGroup g);

/// Hill constants. Invariant: a * v_max == b * f_max, so the force-velocity
/// curve reaches zero exactly at v_max.
struct HillParameters {
  double f_max = 0.0; // N, maximum isometric tension
  double v_max = 0.0; // m/s, maximum shortening velocity
  double a = 0.0;     // N
  double b = 0.0;     // m/s
  double l0 = 0.0;    // m, optimal length

  /// Classic ratios: v_max = 10 l0 / s, a = 0.25 f_max, b = 0.25 v_max.
  static HillParameters with_defaults(double f_max, double l0);
  void validate() const;
};

struct Attachment {
  SegmentId segment;
  Vec3 local; // meters, reference-body segment frame
};

struct MuscleDefinition {
  std::string name;
  MuscleGroup group = MuscleGroup::Deltoideus;
  Side side = Side::Left;
  std::vector<Attachment> attachments;
  std::vector<DofId> spanned_dofs;
  HillParameters hill;
  std::optional<double> pcsa_cm2;

  bool spans(DofId d) const;
};

struct MusculoskeletalModel {
  std::vector<MuscleDefinition> muscles;
  double specific_tension = 30.0; // N/cm^2
  std::string version;

  std::size_t size() const { return muscles.size(); }
  std::optional<std::size_t> find(std::string_view name) const;
  /// DOFs crossed by at least one muscle.
  std::vector<DofId> actuated_dofs() const;
};

/// Parses and validates the JSON model (schema in docs/model-schema.md).
MusculoskeletalModel load_model(std::string_view json_text);
MusculoskeletalModel load_model_file(const std::string& path);

/// Sum of straight-line distances between consecutive world-space attachments.
double muscle_length(const MuscleDefinition& m, const Pose& pose);

/// r = -dl/dtheta by central difference (step 1e-5 rad). Positive r means
/// tension produces a positive torque on `dof`.
double moment_arm(const MuscleDefinition& m, const DofVector& angles, const BodyScale& scale, DofId dof);

/// Contractile force at optimal length for shortening velocity v (m/s).
/// Lengthening is clamped at f_max; beyond v_max the force is zero.
double force_velocity(double v, const HillParameters& p);

struct ForceLength {
  double active = 0.0;  // f_L in [0,1]
  double passive = 0.0; // F_PE in N
};
ForceLength force_length(double norm_length, const HillParameters& p);

struct MuscleState {
  double length = 0.0;
  double norm_length = 0.0;
  double velocity = 0.0; // positive = shortening
  DofVector moment_arms{};
};

struct MuscleStateFrame {
  std::int64_t t_ms = 0;
  std::vector<MuscleState> muscles;
};

/// Lengths, moment arms and shortening velocities for every muscle.
/// `length_scale` multiplies l0 (the subject/reference stature ratio).
MuscleStateFrame compute_muscle_states(const MusculoskeletalModel& model, const JointAngleFrame& q,
                                       const BodyScale& scale, double length_scale = 1.0);

} // namespace musclework
