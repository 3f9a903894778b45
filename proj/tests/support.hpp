#pragma once

#include "musclework/aggregation.hpp"
#include "musclework/muscle_model.hpp"
#include "musclework/synth.hpp"

#include <json.hpp>

#include <string>

namespace mwtest {

using namespace musclework;

inline SkeletonFrame standing_frame(std::int64_t t_ms = 0, double scale = 1.0) {
  JointAngleFrame q;
  q.t_ms = t_ms;
  SkeletonFrame f = forward_kinematics(q, BodyScale::reference().scaled(scale));
  f.t_ms = t_ms;
  return f;
}

/// One canonical-jsonl record; `names` selects the wire names.
inline nlohmann::json record(const SkeletonFrame& f, bool kinect = false) {
  static const char* kinect_names[] = {
      "PELVIS",         "SPINE_NAVEL", "SPINE_CHEST", "NECK",          "HEAD",           "CLAVICLE_LEFT",
      "SHOULDER_LEFT",  "ELBOW_LEFT",  "WRIST_LEFT",  "HIP_LEFT",      "KNEE_LEFT",      "ANKLE_LEFT",
      "FOOT_LEFT",      "CLAVICLE_RIGHT", "SHOULDER_RIGHT", "ELBOW_RIGHT", "WRIST_RIGHT", "HIP_RIGHT",
      "KNEE_RIGHT",     "ANKLE_RIGHT", "FOOT_RIGHT"};
  nlohmann::json j;
  j["t_ms"] = f.t_ms;
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const auto& p = f.positions[i];
    const std::string name = kinect ? kinect_names[i] : std::string(joint_name(static_cast<JointId>(i)));
    j["joints"][name] = {p.x(), p.y(), p.z()};
  }
  return j;
}

inline const MusculoskeletalModel& default_model() {
  static const MusculoskeletalModel m = load_model_file(std::string(MUSCLEWORK_DATA_DIR) + "/default_model.json");
  return m;
}

inline MuscleDefinition toy_muscle(std::string name, MuscleGroup g, Side s, std::vector<Attachment> att,
                                   std::vector<DofId> dofs, double f_max = 600.0, double l0 = 0.3) {
  MuscleDefinition m;
  m.name = std::move(name);
  m.group = g;
  m.side = s;
  m.attachments = std::move(att);
  m.spanned_dofs = std::move(dofs);
  m.hill = HillParameters::with_defaults(f_max, l0);
  return m;
}

} // namespace mwtest
