#include "musclework/measures.hpp"

#include "musclework/error.hpp"
#include "musclework/format.hpp"
#include "musclework/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace musclework {

void SubjectProfile::validate() const {
  if (!(age >= 10.0 && age <= 100.0)) throw InvalidArgument("profile: age must lie in [10, 100]");
  if (!(mass >= 20.0 && mass <= 250.0)) throw InvalidArgument("profile: mass must lie in [20, 250] kg");
}

SubjectProfile SubjectProfile::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("profile: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("profile: top level must be an object");
  SubjectProfile p;
  try {
    p.age = j.value("age", p.age);
    if (j.contains("mass_kg")) {
      p.mass = j.at("mass_kg").get<double>();
    } else {
      log().warn("profile has no mass_kg, assuming 70 kg");
    }
    const std::string g = j.value("gender", std::string("unspecified"));
    if (g == "male") {
      p.gender = Gender::Male;
    } else if (g == "female") {
      p.gender = Gender::Female;
    } else if (g == "unspecified") {
      p.gender = Gender::Unspecified;
    } else {
      throw InvalidArgument("profile: gender must be male, female or unspecified");
    }
    if (j.contains("resting_hr")) p.resting_hr = j.at("resting_hr").get<double>();
    if (j.contains("vo2max")) p.vo2max = j.at("vo2max").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("profile: ") + e.what());
  }
  p.validate();
  return p;
}

double HeartRateSeries::average() const {
  if (samples.empty()) return 0.0;
  double s = 0.0;
  for (const auto& x : samples) s += x.bpm;
  return s / static_cast<double>(samples.size());
}

double HeartRateSeries::peak() const {
  double p = 0.0;
  for (const auto& x : samples) p = std::max(p, x.bpm);
  return p;
}

double HeartRateSeries::duration_minutes() const {
  if (samples.size() < 2) return 0.0;
  return static_cast<double>(samples.back().t_ms - samples.front().t_ms) / 60000.0;
}

void HeartRateSeries::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].bpm >= 25.0 && samples[i].bpm <= 250.0)) throw InvalidArgument("heart rate outside [25, 250] bpm");
    if (i > 0 && samples[i].t_ms <= samples[i - 1].t_ms) throw InvalidArgument("heart rate timestamps must increase");
  }
}

HeartRateSeries HeartRateSeries::from_csv(std::string_view text) {
  HeartRateSeries s;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw MalformedRecord("expected t_ms,bpm", line_no);
    if (line_no == 1 && line.substr(0, comma) == "t_ms") continue;
    HeartRateSample x;
    const char* b = line.data();
    auto r1 = std::from_chars(b, b + comma, x.t_ms);
    char* end = nullptr;
    const std::string bpm_text = line.substr(comma + 1);
    x.bpm = std::strtod(bpm_text.c_str(), &end);
    if (r1.ec != std::errc() || end == bpm_text.c_str()) throw MalformedRecord("expected t_ms,bpm", line_no);
    s.samples.push_back(x);
  }
  s.validate();
  return s;
}

RpeRating::RpeRating(int v) : value(v) {
  if (v < 1 || v > 10) throw InvalidArgument("RPE must be an integer in 1..10");
}

std::string_view RpeRating::label() const {
  if (value == 1) return "very light";
  if (value <= 3) return "light";
  if (value <= 6) return "moderate";
  if (value <= 8) return "vigorous";
  if (value == 9) return "very hard";
  return "max effort";
}

double burned_calories_hr(const SubjectProfile& p, double hr, double minutes) {
  if (minutes < 0.0) throw NegativeDuration("duration must not be negative");
  double kj_per_min = 0.0;
  switch (p.gender) {
  case Gender::Male: kj_per_min = -55.0969 + 0.6309 * hr + 0.1988 * p.mass + 0.2017 * p.age; break;
  case Gender::Female: kj_per_min = -20.4022 + 0.4472 * hr - 0.1263 * p.mass + 0.074 * p.age; break;
  case Gender::Unspecified:
    throw GenderRequired("heart-rate calorie regression needs male or female; use the MET variant");
  }
  return std::max(0.0, kj_per_min / 4.184) * minutes;
}

double burned_calories_hr(const SubjectProfile& p, const HeartRateSeries& hr, double minutes) {
  return burned_calories_hr(p, hr.average(), minutes);
}

double burned_calories_met(double met, double mass_kg, double minutes) {
  if (!(met > 0.0)) throw InvalidArgument("MET must be positive");
  if (minutes < 0.0) throw NegativeDuration("duration must not be negative");
  return met * 3.5 * mass_kg / 200.0 * minutes;
}

std::string_view verdict_name(HrVerdict v) {
  switch (v) {
  case HrVerdict::Lower: return "Lower";
  case HrVerdict::Equal: return "Equal";
  case HrVerdict::Higher: return "Higher";
  }
  return "Equal";
}

RpeComparison rpe_hr_compare(const RpeRating& r, const SubjectProfile& p, double measured, const RpeHrMapping& map) {
  const double hr_max = 220.0 - p.age;
  RpeComparison c;
  c.predicted_hr = hr_max * (map.base + map.per_level * r.value);
  c.band = map.equal_band * hr_max;
  const double diff = measured - c.predicted_hr;
  if (std::abs(diff) <= c.band) {
    c.verdict = HrVerdict::Equal;
  } else {
    c.verdict = diff > 0.0 ? HrVerdict::Higher : HrVerdict::Lower;
  }
  return c;
}

std::vector<double> normalize_across(const std::vector<double>& v) {
  if (v.size() < 2) throw InvalidArgument("normalisation needs at least two values");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  if (range == 0.0) {
    log().warn("all values equal; normalised to 0.5");
    return std::vector<double>(v.size(), 0.5);
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
  return out;
}

std::vector<double> hr_weighted_mw(const std::vector<double>& mw, const std::vector<double>& hr) {
  if (mw.size() != hr.size()) throw LengthMismatch("muscle work and heart rate lists differ in length");
  std::vector<double> prod(mw.size());
  for (std::size_t i = 0; i < mw.size(); ++i) prod[i] = mw[i] * hr[i];
  return normalize_across(prod);
}

std::string MeasureSet::to_json() const {
  nlohmann::ordered_json j;
  j["bc_kcal"] = round9(bc_kcal);
  j["bc_method"] = bc_method;
  j["rpe"] = rpe ? nlohmann::ordered_json(*rpe) : nlohmann::ordered_json(nullptr);
  j["rpe_predicted_hr"] = rpe_predicted_hr ? nlohmann::ordered_json(round9(*rpe_predicted_hr)) : nullptr;
  j["verdict"] = verdict ? nlohmann::ordered_json(std::string(verdict_name(*verdict))) : nullptr;
  j["mw_total"] = round9(mw_total);
  j["av_hr"] = round9(av_hr);
  j["pk_hr"] = round9(pk_hr);
  j["h_mw_normalized"] = h_mw_normalized ? nlohmann::ordered_json(round9(*h_mw_normalized)) : nullptr;
  return j.dump(2) + "\n";
}

} // namespace musclework
