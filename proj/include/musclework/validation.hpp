#pragma once

#include "musclework/aggregation.hpp"
#include "musclework/muscle_model.hpp"
#include "musclework/stats.hpp"
#include "musclework/synth.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace musclework {

struct EffectThresholds {
  double arm_ratio = 3.0;             // pectoralis+triceps, squats with / without arms
  double leg_similarity = 0.05;       // lower-limb work, squats with vs without arms
  double lunge_asymmetry = 0.3;       // quadriceps l/r relative difference
  double squat_symmetry = 0.05;       // at zero noise
  double squat_symmetry_noisy = 0.15; // with noise
};

struct ProtocolConfig {
  int n_subjects = 10;
  std::vector<ExerciseKind> exercises{ExerciseKind::ArmCircles, ExerciseKind::Lunges, ExerciseKind::ShoulderSqueeze,
                                      ExerciseKind::SquatsArms, ExerciseKind::SquatsNoArms};
  int n_measurements = 5;
  int reps_per_measurement = 5;
  double cadence_hz = 0.5;
  double noise_deg = 0.0;
  std::uint64_t seed = 0;
  double stature_min = 0.9, stature_max = 1.1;
  double mass_min = 55.0, mass_max = 95.0;
  bool mirror_half = false; // odd-numbered subjects lunge with the left leg forward
  double alpha = 0.05;
  EffectThresholds thresholds{};

  void validate() const;
  /// Keys match the field names; "exercises" lists kebab-case names and
  /// "thresholds" is an object of EffectThresholds fields.
  static ProtocolConfig from_json(std::string_view text);
};

struct SubjectTraits {
  double stature_factor = 1.0;
  double mass_kg = 70.0;
};
SubjectTraits subject_traits(const ProtocolConfig& c, int subject);

/// Seed of one trial's motion noise, a mix of the protocol seed and the coordinates.
std::uint64_t trial_seed(std::uint64_t seed, int subject, ExerciseKind e, int measurement);

struct TrialResult {
  int subject = 0;
  ExerciseKind exercise = ExerciseKind::SquatsNoArms;
  int measurement = 0;
  GroupVector work{};
  std::size_t infeasible_frames = 0;
};

/// Runs every (subject, exercise, measurement) trial through the full
/// pipeline on `jobs` worker threads. Output order is subject, exercise
/// (config order), measurement regardless of scheduling.
std::vector<TrialResult> run_protocol(const ProtocolConfig& c, const MusculoskeletalModel& model, int jobs = 1);

/// Per-subject cell means over measurements of an analysis signal,
/// indexed [subject][exercise] in the order of `exercises`.
std::vector<std::vector<double>> cell_means(const std::vector<TrialResult>& results, std::size_t signal,
                                            const std::vector<ExerciseKind>& exercises);

AnovaResult rm_anova(const std::vector<TrialResult>& results, std::size_t signal);

struct PairwiseResult {
  ExerciseKind a, b;
  double t = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
};
std::vector<PairwiseResult> pairwise_tests(const std::vector<TrialResult>& results, std::size_t signal);

struct EffectCheck {
  std::string name;
  bool computed = false;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

double relative_difference(double a, double b); // |a-b| / max(a,b), 0 when both are 0

/// Named assertions of the expected exercise effects. Checks whose
/// exercises are absent are reported as not computed; MissingExercise is
/// thrown only when none can be computed.
std::vector<EffectCheck> effect_checks(const std::vector<TrialResult>& results, const ProtocolConfig& c);

std::string trials_csv(const std::vector<TrialResult>& results);
std::string stats_json(const std::vector<TrialResult>& results, const ProtocolConfig& c);
/// exercise, signal, min, q1, median, q3, max over all trials.
std::string boxplot_csv(const std::vector<TrialResult>& results);

} // namespace musclework
