#pragma once

#include "musclework/aggregation.hpp"
#include "musclework/kinematics.hpp"
#include "musclework/muscle_model.hpp"
#include "musclework/skeleton.hpp"
#include "musclework/solver.hpp"

#include <optional>
#include <vector>

namespace musclework {

struct PipelineOptions {
  double rate_hz = 60.0;
  std::size_t smooth_window = 5; // 1 disables smoothing
  std::optional<double> mass_kg; // 70 kg with a warning when absent
  SegmentModel segments = SegmentModel::defaults();
  SolverOptions solver{};
  DisplayOptions display{};
  bool keep_frames = true; // retain per-frame group/limb/display streams
};

struct SessionResult {
  SessionSummary summary;
  BodyScale scale;
  std::vector<DofId> skipped_dofs;
  std::vector<GroupWorkFrame> groups;
  std::vector<LimbWorkFrame> limbs;
  std::vector<DisplayFrame> display;
};

/// Resample, smooth, estimate body scale, joint angles, inverse dynamics,
/// muscle states, static optimisation, work, grouping, display and
/// accumulation for one session.
SessionResult analyze_session(const SessionStream& raw, const MusculoskeletalModel& model,
                              const PipelineOptions& opt = {});

} // namespace musclework
