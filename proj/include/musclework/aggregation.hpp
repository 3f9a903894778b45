#pragma once

#include "musclework/muscle_model.hpp"
#include "musclework/solver.hpp"

#include <array>
#include <deque>
#include <string>
#include <vector>

namespace musclework {

/// 8 groups x 2 sides, index = 2 * group + side.
inline constexpr std::size_t kGroupSideCount = 2 * kMuscleGroupCount;
using GroupVector = std::array<double, kGroupSideCount>;

constexpr std::size_t group_index(MuscleGroup g, Side s) {
  return 2 * static_cast<std::size_t>(g) + static_cast<std::size_t>(s);
}
/// Column label, e.g. "l_quadriceps_femoris".
std::string group_label(std::size_t group_side);

struct GroupWorkFrame {
  std::int64_t t_ms = 0;
  GroupVector values{};
};

struct LimbWork {
  double left_upper = 0.0;
  double right_upper = 0.0;
  double left_lower = 0.0;
  double right_lower = 0.0;
  double overall = 0.0;
};

struct LimbWorkFrame {
  std::int64_t t_ms = 0;
  LimbWork limbs;
};

GroupWorkFrame group_frame(const WorkIncrementFrame& w, const MusculoskeletalModel& model);
LimbWork limb_sums(const GroupVector& g);
LimbWorkFrame limb_frame(const GroupWorkFrame& g);

/// The 14 signals of the statistical analysis: per side quadriceps,
/// ischiocrurales+gluteus, latissimus, deltoideus, biceps/brachialis,
/// triceps, pectoralis.
inline constexpr std::size_t kAnalysisSignalCount = 14;
const std::array<std::string, kAnalysisSignalCount>& analysis_signal_names();
std::array<double, kAnalysisSignalCount> analysis_signals(const GroupVector& g);

struct Rgb {
  int r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Piecewise-linear turquoise -> green -> red gradient, rounded half-up.
struct ColorAnchors {
  std::array<double, 3> low{64, 224, 208};
  std::array<double, 3> mid{0, 128, 0};
  std::array<double, 3> high{255, 0, 0};
};
Rgb color_map(double normalized, const ColorAnchors& anchors = {});

/// What the trailing window sees: per-frame increments (default) or the
/// cumulative totals.
enum class WindowSource { Increments, Cumulative };
/// Normalisation denominator: running session maximum of any group's window
/// median (default) or a fixed scale.
enum class NormalizationMode { RunningMax, FixedScale };

struct DisplayOptions {
  std::size_t window_frames = 60;
  WindowSource source = WindowSource::Increments;
  NormalizationMode normalization = NormalizationMode::RunningMax;
  double fixed_scale = 1.0;
  ColorAnchors anchors{};
};

struct DisplayFrame {
  std::int64_t t_ms = 0;
  GroupVector window_median{};
  GroupVector normalized{};
  std::array<Rgb, kGroupSideCount> rgb{};
};

double median_of(std::vector<double> values);

/// Streaming windowed median display. Single writer per session.
class WindowDisplay {
public:
  explicit WindowDisplay(DisplayOptions opt = {});

  DisplayFrame push(const GroupWorkFrame& g);
  double running_max() const { return running_max_; }
  const DisplayOptions& options() const { return opt_; }

private:
  DisplayOptions opt_;
  std::array<std::deque<double>, kGroupSideCount> windows_;
  GroupVector cumulative_{};
  double running_max_ = 0.0;
};

std::vector<DisplayFrame> window_display(const std::vector<GroupWorkFrame>& stream, const DisplayOptions& opt = {});

struct SessionSummary {
  double duration_s = 0.0;
  std::size_t frame_count = 0;
  std::size_t infeasible_frames = 0;
  std::vector<std::string> muscle_names;
  std::vector<double> muscle_work;
  GroupVector group_work{};
  LimbWork limbs;
  GroupVector peak_window{};

  /// Sums accumulations and frame counts, takes the maximum of the peaks.
  void merge(const SessionSummary& other);
};

/// Accumulates per-frame outputs of one session.
class SessionAccumulator {
public:
  SessionAccumulator(const MusculoskeletalModel& model, double dt_s);

  void add(const WorkIncrementFrame& w, const GroupWorkFrame& g, const DisplayFrame& d, bool infeasible);
  const SessionSummary& summary() const { return summary_; }

private:
  double dt_s_;
  SessionSummary summary_;
};

SessionSummary accumulate_session(const MusculoskeletalModel& model, double dt_s,
                                  const std::vector<WorkIncrementFrame>& work,
                                  const std::vector<GroupWorkFrame>& groups,
                                  const std::vector<DisplayFrame>& display,
                                  const std::vector<bool>& infeasible);

} // namespace musclework
