#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace musclework {

enum class Gender { Male, Female, Unspecified };

struct SubjectProfile {
  double age = 30.0;  // years, [10, 100]
  double mass = 70.0; // kg, [20, 250]
  Gender gender = Gender::Unspecified;
  std::optional<double> resting_hr;
  std::optional<double> vo2max; // carried for completeness; no formula uses it

  void validate() const;
  /// {"age", "mass_kg", "gender": "male|female|unspecified", "resting_hr"?, "vo2max"?}.
  /// A missing mass falls back to 70 kg with a warning.
  static SubjectProfile from_json(std::string_view text);
};

struct HeartRateSample {
  std::int64_t t_ms = 0;
  double bpm = 0.0;
};

struct HeartRateSeries {
  std::vector<HeartRateSample> samples;

  double average() const;
  double peak() const;
  double duration_minutes() const;
  /// CSV "t_ms,bpm" with an optional header line.
  static HeartRateSeries from_csv(std::string_view text);
  void validate() const;
};

/// 1..10 category scale.
struct RpeRating {
  int value = 1;

  explicit RpeRating(int v);
  std::string_view label() const;
};

/// Burned calories from the gender-specific heart-rate regression (per
/// minute, divided by 4.184 kJ/kcal), clamped at zero.
double burned_calories_hr(const SubjectProfile& p, const HeartRateSeries& hr, double minutes);
double burned_calories_hr(const SubjectProfile& p, double avg_hr, double minutes);

/// MET x 3.5 ml/kg/min x mass / 200 x minutes.
double burned_calories_met(double met, double mass_kg, double minutes);

enum class HrVerdict { Lower, Equal, Higher };
std::string_view verdict_name(HrVerdict v);

struct RpeComparison {
  HrVerdict verdict = HrVerdict::Equal;
  double predicted_hr = 0.0;
  double band = 0.0; // +- bpm counted as Equal
};

struct RpeHrMapping {
  double base = 0.55;
  double per_level = 0.045;
  double equal_band = 0.05; // fraction of HRmax
};

/// Compares measured HR against the RPE level converted to heart rate
/// (HRmax = 220 - age).
RpeComparison rpe_hr_compare(const RpeRating& r, const SubjectProfile& p, double measured_avg_hr,
                             const RpeHrMapping& map = {});

/// Min-max normalisation to [0,1]; all-equal input maps to 0.5 (warning).
std::vector<double> normalize_across(const std::vector<double>& values);

/// MW x AV_HR per participant, then normalised.
std::vector<double> hr_weighted_mw(const std::vector<double>& mw_total, const std::vector<double>& av_hr);

struct MeasureSet {
  double bc_kcal = 0.0;
  std::string bc_method; // "heart_rate" or "met"
  std::optional<int> rpe;
  std::optional<double> rpe_predicted_hr;
  std::optional<HrVerdict> verdict;
  double mw_total = 0.0;
  double av_hr = 0.0;
  double pk_hr = 0.0;
  std::optional<double> h_mw_normalized;

  std::string to_json() const;
};

} // namespace musclework
