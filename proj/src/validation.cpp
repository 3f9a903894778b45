#include "musclework/validation.hpp"

#include "musclework/error.hpp"
#include "musclework/format.hpp"
#include "musclework/log.hpp"
#include "musclework/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace musclework {

namespace {

using ojson = nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::vector<ExerciseKind> exercises_in(const std::vector<TrialResult>& r) {
  std::vector<ExerciseKind> out;
  for (const auto& t : r) {
    if (std::find(out.begin(), out.end(), t.exercise) == out.end()) out.push_back(t.exercise);
  }
  return out;
}

std::vector<int> subjects_in(const std::vector<TrialResult>& r) {
  std::vector<int> out;
  for (const auto& t : r) {
    if (std::find(out.begin(), out.end(), t.subject) == out.end()) out.push_back(t.subject);
  }
  return out;
}

bool has(const std::vector<ExerciseKind>& v, ExerciseKind e) { return std::find(v.begin(), v.end(), e) != v.end(); }

/// Mean over measurements of f(work) for each subject doing exercise e.
std::vector<double> subject_means(const std::vector<TrialResult>& results, ExerciseKind e,
                                  double (*f)(const GroupVector&)) {
  const std::vector<int> subjects = subjects_in(results);
  std::vector<double> out;
  for (int s : subjects) {
    double sum = 0.0;
    int n = 0;
    for (const auto& t : results) {
      if (t.subject == s && t.exercise == e) {
        sum += f(t.work);
        ++n;
      }
    }
    if (n > 0) out.push_back(sum / n);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double arm_signal(const GroupVector& g) {
  return g[group_index(MuscleGroup::PectoralisMajor, Side::Left)] +
         g[group_index(MuscleGroup::PectoralisMajor, Side::Right)] +
         g[group_index(MuscleGroup::TricepsBrachii, Side::Left)] +
         g[group_index(MuscleGroup::TricepsBrachii, Side::Right)];
}
double leg_signal(const GroupVector& g) {
  const LimbWork l = limb_sums(g);
  return l.left_lower + l.right_lower;
}
double quad_l(const GroupVector& g) { return g[group_index(MuscleGroup::QuadricepsFemoris, Side::Left)]; }
double quad_r(const GroupVector& g) { return g[group_index(MuscleGroup::QuadricepsFemoris, Side::Right)]; }

/// Mean over subjects of the per-subject quadriceps l/r relative difference.
double quad_asymmetry(const std::vector<TrialResult>& results, ExerciseKind e) {
  const auto l = subject_means(results, e, quad_l);
  const auto r = subject_means(results, e, quad_r);
  std::vector<double> d(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) d[i] = relative_difference(l[i], r[i]);
  return mean(d);
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(round9(v)) : ojson(nullptr); }

} // namespace

void ProtocolConfig::validate() const {
  if (n_subjects < 1 || n_measurements < 1 || reps_per_measurement < 1) {
    throw InvalidArgument("protocol counts must be >= 1");
  }
  if (exercises.empty()) throw InvalidArgument("protocol needs at least one exercise");
  if (!(noise_deg >= 0.0)) throw InvalidArgument("noise must be >= 0");
  if (!(cadence_hz > 0.0)) throw InvalidArgument("cadence must be positive");
  if (!(stature_min > 0.0 && stature_min <= stature_max)) throw InvalidArgument("invalid stature range");
  if (!(mass_min >= 20.0 && mass_min <= mass_max && mass_max <= 250.0)) throw InvalidArgument("invalid mass range");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
}

ProtocolConfig ProtocolConfig::from_json(std::string_view text) {
  ProtocolConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw InvalidArgument("protocol: top level must be an object");
    c.n_subjects = j.value("n_subjects", c.n_subjects);
    c.n_measurements = j.value("n_measurements", c.n_measurements);
    c.reps_per_measurement = j.value("reps_per_measurement", c.reps_per_measurement);
    c.cadence_hz = j.value("cadence_hz", c.cadence_hz);
    c.noise_deg = j.value("noise_deg", c.noise_deg);
    c.seed = j.value("seed", c.seed);
    c.stature_min = j.value("stature_min", c.stature_min);
    c.stature_max = j.value("stature_max", c.stature_max);
    c.mass_min = j.value("mass_min", c.mass_min);
    c.mass_max = j.value("mass_max", c.mass_max);
    c.mirror_half = j.value("mirror_half", c.mirror_half);
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("exercises")) {
      c.exercises.clear();
      for (const auto& e : j.at("exercises")) {
        const auto name = e.get<std::string>();
        const auto k = exercise_from_name(name);
        if (!k) throw InvalidArgument("protocol: unknown exercise " + name);
        if (has(c.exercises, *k)) throw InvalidArgument("protocol: duplicate exercise " + name);
        c.exercises.push_back(*k);
      }
    }
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      c.thresholds.arm_ratio = t.value("arm_ratio", c.thresholds.arm_ratio);
      c.thresholds.leg_similarity = t.value("leg_similarity", c.thresholds.leg_similarity);
      c.thresholds.lunge_asymmetry = t.value("lunge_asymmetry", c.thresholds.lunge_asymmetry);
      c.thresholds.squat_symmetry = t.value("squat_symmetry", c.thresholds.squat_symmetry);
      c.thresholds.squat_symmetry_noisy = t.value("squat_symmetry_noisy", c.thresholds.squat_symmetry_noisy);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("protocol: ") + e.what());
  }
  c.validate();
  return c;
}

SubjectTraits subject_traits(const ProtocolConfig& c, int subject) {
  std::mt19937_64 rng(splitmix64(c.seed ^ splitmix64(0x5B1Ec7ull + static_cast<std::uint64_t>(subject))));
  std::uniform_real_distribution<double> stature(c.stature_min, c.stature_max);
  std::uniform_real_distribution<double> mass(c.mass_min, c.mass_max);
  SubjectTraits t;
  t.stature_factor = c.stature_min == c.stature_max ? c.stature_min : stature(rng);
  t.mass_kg = c.mass_min == c.mass_max ? c.mass_min : mass(rng);
  return t;
}

std::uint64_t trial_seed(std::uint64_t seed, int subject, ExerciseKind e, int measurement) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(subject));
  h = splitmix64(h ^ static_cast<std::uint64_t>(e));
  return splitmix64(h ^ static_cast<std::uint64_t>(measurement));
}

std::vector<TrialResult> run_protocol(const ProtocolConfig& c, const MusculoskeletalModel& model, int jobs) {
  c.validate();
  std::vector<TrialResult> out;
  for (int s = 0; s < c.n_subjects; ++s) {
    for (ExerciseKind e : c.exercises) {
      for (int m = 0; m < c.n_measurements; ++m) out.push_back({s, e, m, {}, 0});
    }
  }

  auto run_one = [&](TrialResult& t) {
    const SubjectTraits traits = subject_traits(c, t.subject);
    MotionParams p;
    p.reps = c.reps_per_measurement;
    p.cadence_hz = c.cadence_hz;
    p.noise_deg = c.noise_deg;
    p.seed = trial_seed(c.seed, t.subject, t.exercise, t.measurement);
    p.stature_factor = traits.stature_factor;
    p.mirror = c.mirror_half && (t.subject % 2 == 1);
    PipelineOptions opt;
    opt.mass_kg = traits.mass_kg;
    opt.keep_frames = false;
    try {
      const SessionResult r = analyze_session(generate(t.exercise, p), model, opt);
      t.work = r.summary.group_work;
      t.infeasible_frames = r.summary.infeasible_frames;
    } catch (const Error& err) {
      log().error("trial subject {} exercise {} measurement {} failed: {}", t.subject, exercise_name(t.exercise),
                  t.measurement, err.what());
      throw;
    }
  };

  const std::size_t workers = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  if (workers == 1) {
    for (auto& t : out) run_one(t);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= out.size()) return;
        try {
          run_one(out[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(out.size());
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<std::vector<double>> cell_means(const std::vector<TrialResult>& results, std::size_t signal,
                                            const std::vector<ExerciseKind>& exercises) {
  if (signal >= kAnalysisSignalCount) throw InvalidArgument("unknown analysis signal");
  const std::vector<int> subjects = subjects_in(results);
  std::vector<std::vector<double>> cells;
  for (int s : subjects) {
    std::vector<double> row;
    for (ExerciseKind e : exercises) {
      double sum = 0.0;
      int n = 0;
      for (const auto& t : results) {
        if (t.subject == s && t.exercise == e) {
          sum += analysis_signals(t.work)[signal];
          ++n;
        }
      }
      if (n == 0) {
        throw UnbalancedDesign("subject " + std::to_string(s) + " has no trial of " + std::string(exercise_name(e)));
      }
      row.push_back(sum / n);
    }
    cells.push_back(row);
  }
  return cells;
}

AnovaResult rm_anova(const std::vector<TrialResult>& results, std::size_t signal) {
  AnovaResult r = rm_anova_cells(cell_means(results, signal, exercises_in(results)));
  r.group = analysis_signal_names()[signal];
  return r;
}

std::vector<PairwiseResult> pairwise_tests(const std::vector<TrialResult>& results, std::size_t signal) {
  const std::vector<ExerciseKind> ex = exercises_in(results);
  const auto cells = cell_means(results, signal, ex);
  std::vector<PairwiseResult> out;
  std::vector<double> raw;
  for (std::size_t a = 0; a < ex.size(); ++a) {
    for (std::size_t b = a + 1; b < ex.size(); ++b) {
      std::vector<double> x, y;
      for (const auto& row : cells) {
        x.push_back(row[a]);
        y.push_back(row[b]);
      }
      const PairedT t = paired_t(x, y);
      out.push_back({ex[a], ex[b], t.t, t.p, 1.0});
      raw.push_back(t.p);
    }
  }
  const auto adj = holm_adjust(raw);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].p_adjusted = adj[i];
  return out;
}

double relative_difference(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m > 0.0 ? std::abs(a - b) / m : 0.0;
}

std::vector<EffectCheck> effect_checks(const std::vector<TrialResult>& results, const ProtocolConfig& c) {
  const std::vector<ExerciseKind> ex = exercises_in(results);
  const EffectThresholds& th = c.thresholds;
  std::vector<EffectCheck> out;
  const bool both_squats = has(ex, ExerciseKind::SquatsArms) && has(ex, ExerciseKind::SquatsNoArms);

  EffectCheck arm{"arm_involvement", false, false, 0.0, th.arm_ratio, ""};
  EffectCheck legs{"leg_similarity", false, false, 0.0, th.leg_similarity, ""};
  if (both_squats) {
    const double with = mean(subject_means(results, ExerciseKind::SquatsArms, arm_signal));
    const double without = mean(subject_means(results, ExerciseKind::SquatsNoArms, arm_signal));
    arm.computed = true;
    arm.value = without > 0.0 ? with / without : (with > 0.0 ? INFINITY : 0.0);
    arm.passed = arm.value >= th.arm_ratio;
    arm.detail = "pectoralis+triceps work, squats-arms / squats-no-arms";
    legs.computed = true;
    legs.value = relative_difference(mean(subject_means(results, ExerciseKind::SquatsArms, leg_signal)),
                                     mean(subject_means(results, ExerciseKind::SquatsNoArms, leg_signal)));
    legs.passed = legs.value <= th.leg_similarity;
    legs.detail = "lower-limb work relative difference, squats-arms vs squats-no-arms";
  } else {
    arm.detail = legs.detail = "needs squats-arms and squats-no-arms";
  }
  out.push_back(arm);
  out.push_back(legs);

  EffectCheck lunge{"lunge_asymmetry", false, false, 0.0, th.lunge_asymmetry, ""};
  if (has(ex, ExerciseKind::Lunges)) {
    lunge.computed = true;
    lunge.value = quad_asymmetry(results, ExerciseKind::Lunges);
    lunge.passed = lunge.value >= th.lunge_asymmetry;
    lunge.detail = "quadriceps l/r relative difference, per subject then averaged";
  } else {
    lunge.detail = "needs lunges";
  }
  out.push_back(lunge);

  const double limit = c.noise_deg > 0.0 ? th.squat_symmetry_noisy : th.squat_symmetry;
  EffectCheck squat{"squat_symmetry", false, false, 0.0, limit, ""};
  for (ExerciseKind e : {ExerciseKind::SquatsArms, ExerciseKind::SquatsNoArms}) {
    if (!has(ex, e)) continue;
    squat.computed = true;
    squat.value = std::max(squat.value, quad_asymmetry(results, e));
  }
  if (squat.computed) {
    squat.passed = squat.value <= limit;
    squat.detail = "largest quadriceps l/r relative difference over squat variants";
  } else {
    squat.detail = "needs a squat exercise";
  }
  out.push_back(squat);

  if (std::none_of(out.begin(), out.end(), [](const EffectCheck& e) { return e.computed; })) {
    throw MissingExercise("no effect check can be computed from the exercises present");
  }
  return out;
}

std::string trials_csv(const std::vector<TrialResult>& results) {
  std::ostringstream out;
  out << "subject,exercise,measurement";
  for (std::size_t k = 0; k < kGroupSideCount; ++k) out << ',' << group_label(k);
  out << '\n';
  for (const auto& t : results) {
    out << t.subject << ',' << exercise_name(t.exercise) << ',' << t.measurement;
    for (double v : t.work) out << ',' << fmt9(v);
    out << '\n';
  }
  return out.str();
}

std::string stats_json(const std::vector<TrialResult>& results, const ProtocolConfig& c) {
  ojson j;
  j["alpha"] = c.alpha;
  j["trials"] = results.size();
  ojson anova = ojson::array();
  ojson pairwise = ojson::object();
  const std::size_t subjects = subjects_in(results).size();
  const std::size_t exercises = exercises_in(results).size();
  if (subjects >= 2 && exercises >= 2) {
    for (std::size_t s = 0; s < kAnalysisSignalCount; ++s) {
      const AnovaResult a = rm_anova(results, s);
      ojson row;
      row["signal"] = a.group;
      row["F"] = number_or_null(a.f);
      row["F_infinite"] = a.f_infinite;
      row["df"] = ojson::array({a.df_factor, a.df_error});
      row["p"] = round9(a.p);
      row["partial_eta2"] = round9(a.partial_eta2);
      row["magnitude"] = std::string(1, a.magnitude);
      row["significant"] = a.p < c.alpha;
      anova.push_back(row);
      ojson pairs = ojson::array();
      for (const auto& p : pairwise_tests(results, s)) {
        pairs.push_back({{"a", std::string(exercise_name(p.a))},
                         {"b", std::string(exercise_name(p.b))},
                         {"t", number_or_null(p.t)},
                         {"p_raw", round9(p.p_raw)},
                         {"p_adjusted", round9(p.p_adjusted)}});
      }
      pairwise[a.group] = pairs;
    }
  } else {
    log().warn("statistics need at least two subjects and two exercises; skipped");
  }
  j["anova"] = anova;
  j["pairwise"] = pairwise;
  ojson checks = ojson::array();
  for (const auto& e : effect_checks(results, c)) {
    checks.push_back({{"name", e.name},
                      {"computed", e.computed},
                      {"passed", e.passed},
                      {"value", number_or_null(e.value)},
                      {"threshold", round9(e.threshold)},
                      {"detail", e.detail}});
  }
  j["effect_checks"] = checks;
  return j.dump(2) + "\n";
}

std::string boxplot_csv(const std::vector<TrialResult>& results) {
  std::ostringstream out;
  out << "exercise,signal,min,q1,median,q3,max\n";
  for (ExerciseKind e : exercises_in(results)) {
    for (std::size_t s = 0; s < kAnalysisSignalCount; ++s) {
      std::vector<double> v;
      for (const auto& t : results) {
        if (t.exercise == e) v.push_back(analysis_signals(t.work)[s]);
      }
      out << exercise_name(e) << ',' << analysis_signal_names()[s] << ',' << fmt9(quantile(v, 0.0)) << ','
          << fmt9(quantile(v, 0.25)) << ',' << fmt9(quantile(v, 0.5)) << ',' << fmt9(quantile(v, 0.75)) << ','
          << fmt9(quantile(v, 1.0)) << '\n';
    }
  }
  return out.str();
}

} // namespace musclework
