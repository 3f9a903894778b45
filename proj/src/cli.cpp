#include "musclework/cli.hpp"

#include "musclework/error.hpp"
#include "musclework/export.hpp"
#include "musclework/format.hpp"
#include "musclework/log.hpp"
#include "musclework/measures.hpp"
#include "musclework/pipeline.hpp"
#include "musclework/synth.hpp"
#include "musclework/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace musclework {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << text;
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw UsageError("cannot create output directory " + dir);
  return p;
}

StreamFormat detect_format(const std::string& choice, const std::string& text) {
  if (choice == "canonical") return StreamFormat::CanonicalJsonl;
  if (choice == "kinect32") return StreamFormat::Kinect32Jsonl;
  const auto nl = text.find('\n');
  const std::string first = text.substr(0, nl);
  return first.find("\"SHOULDER_LEFT\"") != std::string::npos ? StreamFormat::Kinect32Jsonl
                                                                 : StreamFormat::CanonicalJsonl;
}

struct AnalyzeArgs {
  std::string input;
  std::string model = data_path("default_model.json");
  std::string out = ".";
  std::string profile;
  std::string format = "auto";
  std::size_t window = 60;
  double rate = 60.0;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const MusculoskeletalModel model = load_model_file(a.model);
  const std::string text = read_file(a.input);
  const SessionStream s = parse_session(text, detect_format(a.format, text));
  PipelineOptions opt;
  opt.rate_hz = a.rate;
  opt.display.window_frames = a.window;
  if (!a.profile.empty()) opt.mass_kg = SubjectProfile::from_json(read_file(a.profile)).mass;
  const SessionResult r = analyze_session(s, model, opt);
  const fs::path dir = ensure_dir(a.out);
  write_file(dir / "summary.json", summary_json(r, model));
  write_file(dir / "groups.csv", groups_csv(r));
  write_file(dir / "heatmap.json", heatmap_json(r, opt.display.anchors));
  write_file(dir / "limbs.svg", limbs_svg(r.summary.limbs));
  out << summary_line(r.summary) << '\n';
  return kExitOk;
}

struct SynthArgs {
  std::string exercise;
  std::string out;
  MotionParams params;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto kind = exercise_from_name(a.exercise);
  if (!kind) throw UsageError("unknown exercise " + a.exercise);
  const std::string text = serialize_session(generate(*kind, a.params));
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(ensure_dir(a.out) / (a.exercise + ".jsonl"), text);
  }
  return kExitOk;
}

struct ValidateArgs {
  std::string protocol;
  std::string model = data_path("default_model.json");
  std::string out = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool mirror = false;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  ProtocolConfig c = a.protocol.empty() ? ProtocolConfig{} : ProtocolConfig::from_json(read_file(a.protocol));
  if (a.seed) c.seed = *a.seed;
  if (a.mirror) c.mirror_half = true;
  const MusculoskeletalModel model = load_model_file(a.model);
  const std::vector<TrialResult> results = run_protocol(c, model, a.jobs);
  const fs::path dir = ensure_dir(a.out);
  write_file(dir / "trials.csv", trials_csv(results));
  write_file(dir / "stats.json", stats_json(results, c));
  write_file(dir / "boxplot.csv", boxplot_csv(results));
  out << results.size() << " trials\n";
  for (const auto& e : effect_checks(results, c)) {
    out << e.name << ": " << (e.computed ? (e.passed ? "pass" : "FAIL") : "skipped");
    if (e.computed) out << " (value " << fmt9(round9(e.value)) << ", threshold " << fmt9(e.threshold) << ")";
    out << '\n';
  }
  return kExitOk;
}

struct MeasuresArgs {
  std::string summary;
  std::string hr;
  std::string profile;
  std::string out;
  std::optional<int> rpe;
  std::optional<double> met;
  std::optional<double> minutes;
};

int cmd_measures(const MeasuresArgs& a, std::ostream& out) {
  MeasureSet m;
  double session_minutes = 0.0;
  if (!a.summary.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(a.summary));
      m.mw_total = j.at("limbs").at("overall").get<double>();
      session_minutes = j.at("duration_s").get<double>() / 60.0;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("summary: ") + e.what(), 0);
    }
  }
  SubjectProfile profile;
  if (!a.profile.empty()) {
    profile = SubjectProfile::from_json(read_file(a.profile));
  } else {
    log().warn("no profile given, assuming age 30, 70 kg");
  }
  std::optional<HeartRateSeries> hr;
  if (!a.hr.empty()) {
    hr = HeartRateSeries::from_csv(read_file(a.hr));
    m.av_hr = hr->average();
    m.pk_hr = hr->peak();
  }
  double minutes = session_minutes;
  if (a.minutes) {
    minutes = *a.minutes;
  } else if (hr && hr->duration_minutes() > 0.0) {
    minutes = hr->duration_minutes();
  }
  if (a.met) {
    m.bc_method = "met";
    m.bc_kcal = burned_calories_met(*a.met, profile.mass, minutes);
  } else if (hr) {
    m.bc_method = "heart_rate";
    m.bc_kcal = burned_calories_hr(profile, *hr, minutes);
  } else {
    throw UsageError("measures needs --hr or --met for burned calories");
  }
  if (a.rpe) {
    const RpeRating rating(*a.rpe);
    m.rpe = rating.value;
    if (hr) {
      const RpeComparison c = rpe_hr_compare(rating, profile, m.av_hr);
      m.rpe_predicted_hr = c.predicted_hr;
      m.verdict = c.verdict;
    }
  }
  const std::string text = m.to_json();
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(ensure_dir(a.out) / "measures.json", text);
  }
  return kExitOk;
}

} // namespace

std::string data_path(const std::string& name) { return (fs::path(MUSCLEWORK_DATA_DIR) / name).string(); }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimate per-muscle work from skeleton motion", "musclework"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Analyze a recorded session");
  analyze->add_option("input", an.input, "canonical- or kinect32-jsonl session")->required();
  analyze->add_option("--model", an.model, "muscle model JSON");
  analyze->add_option("--out", an.out, "output directory");
  analyze->add_option("--window", an.window, "display window in frames")->check(CLI::PositiveNumber);
  analyze->add_option("--rate", an.rate, "resampling rate in Hz")->check(CLI::PositiveNumber);
  analyze->add_option("--profile", an.profile, "subject profile JSON (mass)");
  analyze->add_option("--format", an.format, "input format")->check(CLI::IsMember({"auto", "canonical", "kinect32"}));

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic exercise session");
  synth->add_option("exercise", sy.exercise, "arm-circles, lunges, shoulder-squeeze, squats-arms, squats-no-arms")
      ->required();
  synth->add_option("--out", sy.out, "output directory (stdout when omitted)");
  synth->add_option("--reps", sy.params.reps, "repetitions")->check(CLI::PositiveNumber);
  synth->add_option("--cadence", sy.params.cadence_hz, "repetitions per second")->check(CLI::PositiveNumber);
  synth->add_option("--noise", sy.params.noise_deg, "joint-angle noise in degrees")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", sy.params.seed, "noise seed");
  synth->add_option("--stature", sy.params.stature_factor, "stature multiplier")->check(CLI::PositiveNumber);
  synth->add_option("--rate", sy.params.rate_hz, "frame rate in Hz")->check(CLI::PositiveNumber);
  synth->add_flag("--mirror", sy.params.mirror, "lunge with the left leg forward");

  ValidateArgs va;
  std::uint64_t va_seed = 0;
  auto* validate = app.add_subcommand("validate", "Run the synthetic validation protocol");
  validate->add_option("--protocol", va.protocol, "protocol JSON");
  validate->add_option("--model", va.model, "muscle model JSON");
  validate->add_option("--out", va.out, "output directory");
  validate->add_option("--jobs", va.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = validate->add_option("--seed", va_seed, "protocol seed override");
  validate->add_flag("--mirror", va.mirror, "odd subjects lunge with the left leg forward");

  MeasuresArgs me;
  int rpe = 0;
  double met = 0.0, minutes = 0.0;
  auto* measures = app.add_subcommand("measures", "Burned calories, RPE comparison and muscle work");
  measures->add_option("--summary", me.summary, "summary.json of an analyzed session");
  measures->add_option("--hr", me.hr, "heart-rate CSV (t_ms,bpm)");
  measures->add_option("--profile", me.profile, "subject profile JSON");
  auto* rpe_opt = measures->add_option("--rpe", rpe, "perceived exertion 1..10")->check(CLI::Range(1, 10));
  auto* met_opt = measures->add_option("--met", met, "MET value")->check(CLI::PositiveNumber);
  auto* min_opt = measures->add_option("--minutes", minutes, "activity duration")->check(CLI::NonNegativeNumber);
  measures->add_option("--out", me.out, "output directory (stdout when omitted)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(an, out);
    if (*synth) return cmd_synth(sy, out);
    if (*validate) {
      if (*seed_opt) va.seed = va_seed;
      return cmd_validate(va, out);
    }
    if (*measures) {
      if (*rpe_opt) me.rpe = rpe;
      if (*met_opt) me.met = met;
      if (*min_opt) me.minutes = minutes;
      return cmd_measures(me, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GenderRequired& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << '\n';
    return kExitParse;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

} // namespace musclework
