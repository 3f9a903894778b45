#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace musclework {

using Vec3 = Eigen::Vector3d;

/// Canonical 21-joint skeleton. Codes are stable (declaration order).
enum class JointId : int {
  Pelvis = 0,
  SpineNavel,
  SpineChest,
  Neck,
  Head,
  ClavicleL,
  ShoulderL,
  ElbowL,
  WristL,
  HipL,
  KneeL,
  AnkleL,
  FootL,
  ClavicleR,
  ShoulderR,
  ElbowR,
  WristR,
  HipR,
  KneeR,
  AnkleR,
  FootR,
};

inline constexpr std::size_t kJointCount = 21;
inline constexpr std::size_t kBoneCount = 20;

constexpr std::size_t index(JointId j) { return static_cast<std::size_t>(j); }

/// Canonical wire name, e.g. "SHOULDER_L".
std::string_view joint_name(JointId j);
std::optional<JointId> joint_from_name(std::string_view name);

/// Bone i connects bone_parent(i) -> bone_child(i); the tree is rooted at the pelvis.
struct Bone {
  JointId parent;
  JointId child;
};
const std::array<Bone, kBoneCount>& bones();
/// Index of the bone ending at `child`, if any (every joint except the pelvis).
std::optional<std::size_t> bone_to(JointId child);

struct SkeletonFrame {
  std::int64_t t_ms = 0;
  std::array<Vec3, kJointCount> positions{};
  std::array<double, kJointCount> confidence = filled(1.0);

  const Vec3& operator[](JointId j) const { return positions[index(j)]; }
  Vec3& operator[](JointId j) { return positions[index(j)]; }

  static std::array<double, kJointCount> filled(double v) {
    std::array<double, kJointCount> a;
    a.fill(v);
    return a;
  }
};

/// Ordered frames. `rate_hz` > 0 once the stream sits on a uniform grid; the
/// exact time of frame i is then t0_ms + i * 1000 / rate_hz and frames[i].t_ms
/// is that time rounded to the nearest millisecond.
struct SessionStream {
  std::vector<SkeletonFrame> frames;
  double rate_hz = 0.0;
  double t0_ms = 0.0;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  bool uniform() const { return rate_hz > 0.0; }
  /// Exact frame time in seconds (grid time when uniform, t_ms otherwise).
  double time_s(std::size_t i) const;
};

struct BodyScale {
  std::array<double, kBoneCount> lengths{}; // indexed like bones()
  double stature = 0.0;

  double length(JointId child) const;
  /// Reference adult proportions (about 1.75 m tall), used by synth and the default model.
  static BodyScale reference();
  BodyScale scaled(double factor) const;
};

enum class StreamFormat { CanonicalJsonl, Kinect32Jsonl };

/// Parses line-delimited joint records. Blank lines are skipped.
SessionStream parse_session(std::string_view text, StreamFormat format);

/// Canonical-jsonl with 9 significant digits; confidence is written only when
/// some joint differs from 1.
std::string serialize_session(const SessionStream& s);

SessionStream resample(const SessionStream& s, double rate_hz = 60.0);

/// Centered moving average with shrunken symmetric windows at the edges.
SessionStream smooth(const SessionStream& s, std::size_t window_frames = 5);

/// Median bone lengths across frames; warns when homologous bones differ by >25%.
BodyScale estimate_body_scale(const SessionStream& s);

} // namespace musclework
