#include "musclework/aggregation.hpp"

#include "musclework/error.hpp"

#include <algorithm>
#include <cmath>

namespace musclework {

std::string group_label(std::size_t gs) {
  const auto g = static_cast<MuscleGroup>(gs / 2);
  return std::string(gs % 2 == 0 ? "l_" : "r_") + std::string(group_name(g));
}

GroupWorkFrame group_frame(const WorkIncrementFrame& w, const MusculoskeletalModel& model) {
  if (w.work.size() != model.size()) throw InvalidArgument("work increments do not match the model");
  GroupWorkFrame g;
  g.t_ms = w.t_ms;
  for (std::size_t m = 0; m < model.size(); ++m) {
    g.values[group_index(model.muscles[m].group, model.muscles[m].side)] += w.work[m];
  }
  return g;
}

LimbWork limb_sums(const GroupVector& g) {
  LimbWork l;
  for (std::size_t k = 0; k < kMuscleGroupCount; ++k) {
    const auto group = static_cast<MuscleGroup>(k);
    const double left = g[group_index(group, Side::Left)];
    const double right = g[group_index(group, Side::Right)];
    if (is_upper_limb(group)) {
      l.left_upper += left;
      l.right_upper += right;
    } else {
      l.left_lower += left;
      l.right_lower += right;
    }
  }
  l.overall = l.left_upper + l.right_upper + l.left_lower + l.right_lower;
  return l;
}

LimbWorkFrame limb_frame(const GroupWorkFrame& g) { return {g.t_ms, limb_sums(g.values)}; }

const std::array<std::string, kAnalysisSignalCount>& analysis_signal_names() {
  static const std::array<std::string, kAnalysisSignalCount> names = {
      "l_quadriceps", "r_quadriceps", "l_ischi_glutm", "r_ischi_glutm", "l_latissimus", "r_latissimus",
      "l_deltoideus", "r_deltoideus", "l_biceps_brach", "r_biceps_brach", "l_triceps", "r_triceps",
      "l_pectoralis", "r_pectoralis",
  };
  return names;
}

std::array<double, kAnalysisSignalCount> analysis_signals(const GroupVector& g) {
  std::array<double, kAnalysisSignalCount> out{};
  std::size_t k = 0;
  for (Side s : {Side::Left, Side::Right}) {
    out[k + 0] = g[group_index(MuscleGroup::QuadricepsFemoris, s)];
    out[k + 2] = g[group_index(MuscleGroup::Ischiocrurales, s)] + g[group_index(MuscleGroup::GluteusMaximus, s)];
    out[k + 4] = g[group_index(MuscleGroup::LatissimusDorsi, s)];
    out[k + 6] = g[group_index(MuscleGroup::Deltoideus, s)];
    out[k + 8] = g[group_index(MuscleGroup::BicepsBrachiiBrachialis, s)];
    out[k + 10] = g[group_index(MuscleGroup::TricepsBrachii, s)];
    out[k + 12] = g[group_index(MuscleGroup::PectoralisMajor, s)];
    ++k;
  }
  return out;
}

Rgb color_map(double x, const ColorAnchors& c) {
  x = std::clamp(std::isnan(x) ? 0.0 : x, 0.0, 1.0);
  const auto& lo = x <= 0.5 ? c.low : c.mid;
  const auto& hi = x <= 0.5 ? c.mid : c.high;
  const double t = x <= 0.5 ? x / 0.5 : (x - 0.5) / 0.5;
  auto channel = [t](double a, double b) {
    const double v = a + t * (b - a);
    return std::clamp(static_cast<int>(std::floor(v + 0.5)), 0, 255);
  };
  return {channel(lo[0], hi[0]), channel(lo[1], hi[1]), channel(lo[2], hi[2])};
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

WindowDisplay::WindowDisplay(DisplayOptions opt) : opt_(opt) {
  if (opt_.window_frames == 0) throw InvalidArgument("window must hold at least one frame");
  if (opt_.normalization == NormalizationMode::FixedScale && !(opt_.fixed_scale > 0.0)) {
    throw InvalidArgument("fixed normalisation scale must be positive");
  }
}

DisplayFrame WindowDisplay::push(const GroupWorkFrame& g) {
  DisplayFrame d;
  d.t_ms = g.t_ms;
  std::vector<double> scratch;
  scratch.reserve(opt_.window_frames);
  for (std::size_t k = 0; k < kGroupSideCount; ++k) {
    cumulative_[k] += g.values[k];
    auto& w = windows_[k];
    w.push_back(opt_.source == WindowSource::Increments ? g.values[k] : cumulative_[k]);
    if (w.size() > opt_.window_frames) w.pop_front();
    scratch.assign(w.begin(), w.end());
    d.window_median[k] = median_of(scratch);
    running_max_ = std::max(running_max_, d.window_median[k]);
  }
  const double denom = opt_.normalization == NormalizationMode::RunningMax ? running_max_ : opt_.fixed_scale;
  for (std::size_t k = 0; k < kGroupSideCount; ++k) {
    d.normalized[k] = denom > 0.0 ? std::clamp(d.window_median[k] / denom, 0.0, 1.0) : 0.0;
    d.rgb[k] = color_map(d.normalized[k], opt_.anchors);
  }
  return d;
}

std::vector<DisplayFrame> window_display(const std::vector<GroupWorkFrame>& stream, const DisplayOptions& opt) {
  WindowDisplay wd(opt);
  std::vector<DisplayFrame> out;
  out.reserve(stream.size());
  for (const auto& g : stream) out.push_back(wd.push(g));
  return out;
}

void SessionSummary::merge(const SessionSummary& o) {
  if (muscle_work.empty()) {
    muscle_names = o.muscle_names;
    muscle_work.assign(o.muscle_work.size(), 0.0);
  }
  if (o.muscle_work.size() != muscle_work.size()) throw InvalidArgument("cannot merge summaries of different models");
  duration_s += o.duration_s;
  frame_count += o.frame_count;
  infeasible_frames += o.infeasible_frames;
  for (std::size_t m = 0; m < muscle_work.size(); ++m) muscle_work[m] += o.muscle_work[m];
  for (std::size_t k = 0; k < kGroupSideCount; ++k) {
    group_work[k] += o.group_work[k];
    peak_window[k] = std::max(peak_window[k], o.peak_window[k]);
  }
  limbs = limb_sums(group_work);
}

SessionAccumulator::SessionAccumulator(const MusculoskeletalModel& model, double dt_s) : dt_s_(dt_s) {
  for (const auto& m : model.muscles) summary_.muscle_names.push_back(m.name);
  summary_.muscle_work.assign(model.size(), 0.0);
}

void SessionAccumulator::add(const WorkIncrementFrame& w, const GroupWorkFrame& g, const DisplayFrame& d,
                             bool infeasible) {
  if (w.work.size() != summary_.muscle_work.size()) throw InvalidArgument("work increments do not match the model");
  for (std::size_t m = 0; m < w.work.size(); ++m) summary_.muscle_work[m] += w.work[m];
  for (std::size_t k = 0; k < kGroupSideCount; ++k) {
    summary_.group_work[k] += g.values[k];
    summary_.peak_window[k] = std::max(summary_.peak_window[k], d.window_median[k]);
  }
  summary_.limbs = limb_sums(summary_.group_work);
  ++summary_.frame_count;
  if (infeasible) ++summary_.infeasible_frames;
  summary_.duration_s = static_cast<double>(summary_.frame_count) * dt_s_;
}

SessionSummary accumulate_session(const MusculoskeletalModel& model, double dt_s,
                                  const std::vector<WorkIncrementFrame>& work,
                                  const std::vector<GroupWorkFrame>& groups, const std::vector<DisplayFrame>& display,
                                  const std::vector<bool>& infeasible) {
  if (work.size() != groups.size() || work.size() != display.size() ||
      (!infeasible.empty() && infeasible.size() != work.size())) {
    throw InvalidArgument("session streams are not aligned");
  }
  SessionAccumulator acc(model, dt_s);
  for (std::size_t i = 0; i < work.size(); ++i) {
    acc.add(work[i], groups[i], display[i], !infeasible.empty() && infeasible[i]);
  }
  return acc.summary();
}

} // namespace musclework
