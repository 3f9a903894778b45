#include "support.hpp"

#include "musclework/error.hpp"
#include "musclework/export.hpp"
#include "musclework/pipeline.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

using namespace musclework;

namespace {

const SessionResult& squat_result() {
  static const SessionResult r = [] {
    MotionParams p;
    p.reps = 2;
    PipelineOptions opt;
    opt.mass_kg = 70.0;
    return analyze_session(generate(ExerciseKind::SquatsArms, p), mwtest::default_model(), opt);
  }();
  return r;
}

double group_sum(const GroupVector& g) {
  double s = 0.0;
  for (double v : g) s += v;
  return s;
}

void expect_decomposes(const LimbWork& l, const GroupVector& g) {
  const double scale = std::max(1.0, std::abs(l.overall));
  EXPECT_LE(std::abs(l.overall - (l.left_upper + l.right_upper + l.left_lower + l.right_lower)), 1e-9 * scale);
  EXPECT_LE(std::abs(l.overall - group_sum(g)), 1e-9 * scale);
}

} // namespace

TEST(Pipeline, EmptyStream) {
  try {
    analyze_session(SessionStream{}, mwtest::default_model());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no frames"), std::string::npos);
  }
}

TEST(Pipeline, SquatSummary) {
  const SessionResult& r = squat_result();
  EXPECT_EQ(r.summary.frame_count, 240u);
  EXPECT_NEAR(r.summary.duration_s, 4.0, 1e-12);
  EXPECT_EQ(r.summary.infeasible_frames, 0u);
  EXPECT_EQ(r.groups.size(), 240u);
  EXPECT_NEAR(r.summary.limbs.left_lower, r.summary.limbs.right_lower, 1e-9 * r.summary.limbs.left_lower);
  EXPECT_NEAR(r.summary.limbs.left_upper, r.summary.limbs.right_upper, 1e-9 * r.summary.limbs.left_upper);
  EXPECT_GT(r.summary.limbs.left_lower, 0.0);
  EXPECT_NEAR(r.scale.stature, BodyScale::reference().stature, 1e-9);
  // ankles and trunk carry no muscles in the default model
  EXPECT_EQ(r.skipped_dofs.size(), 3u);
}

TEST(Pipeline, DecompositionEveryFrame) {
  const SessionResult& r = squat_result();
  for (std::size_t i = 0; i < r.groups.size(); ++i) expect_decomposes(r.limbs[i].limbs, r.groups[i].values);
  expect_decomposes(r.summary.limbs, r.summary.group_work);
  double muscles = 0.0;
  for (double w : r.summary.muscle_work) muscles += w;
  EXPECT_LE(std::abs(muscles - r.summary.limbs.overall), 1e-9 * r.summary.limbs.overall);
}

TEST(Pipeline, KeepFramesDoesNotChangeSummary) {
  MotionParams p;
  p.reps = 2;
  PipelineOptions opt;
  opt.mass_kg = 70.0;
  opt.keep_frames = false;
  const SessionResult lean = analyze_session(generate(ExerciseKind::SquatsArms, p), mwtest::default_model(), opt);
  EXPECT_TRUE(lean.groups.empty());
  EXPECT_EQ(lean.summary.group_work, squat_result().summary.group_work);
}

TEST(Pipeline, HeavierSubjectWorksHarder) {
  MotionParams p;
  p.reps = 1;
  const SessionStream s = generate(ExerciseKind::SquatsNoArms, p);
  PipelineOptions light, heavy;
  light.mass_kg = 60.0;
  heavy.mass_kg = 90.0;
  EXPECT_GT(analyze_session(s, mwtest::default_model(), heavy).summary.limbs.overall,
            analyze_session(s, mwtest::default_model(), light).summary.limbs.overall);
}

TEST(Pipeline, WindowOption) {
  MotionParams p;
  p.reps = 1;
  PipelineOptions opt;
  opt.mass_kg = 70.0;
  opt.display.window_frames = 120;
  const SessionResult r = analyze_session(generate(ExerciseKind::SquatsNoArms, p), mwtest::default_model(), opt);
  std::vector<double> tail;
  const std::size_t q = group_index(MuscleGroup::QuadricepsFemoris, Side::Left);
  for (const auto& g : r.groups) tail.push_back(g.values[q]);
  EXPECT_EQ(r.display.back().window_median[q], median_of(tail));
}

TEST(Export, SummaryJson) {
  const auto j = nlohmann::json::parse(summary_json(squat_result(), mwtest::default_model()));
  EXPECT_EQ(j["frame_count"], 240);
  EXPECT_EQ(j["muscles"].size(), 24u);
  EXPECT_EQ(j["groups"].size(), 16u);
  EXPECT_TRUE(j["groups"].contains("l_quadriceps_femoris"));
  EXPECT_TRUE(j["groups"]["r_gluteus_maximus"].contains("peak_window"));
  EXPECT_EQ(j["skipped_dofs"].size(), 3u);
  const auto& l = j["limbs"];
  EXPECT_NEAR(l["overall"].get<double>(),
              l["left_upper"].get<double>() + l["right_upper"].get<double>() + l["left_lower"].get<double>() +
                  l["right_lower"].get<double>(),
              1e-6 * l["overall"].get<double>());
}

TEST(Export, GroupsCsv) {
  const std::string csv = groups_csv(squat_result());
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 241);
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 21);
  EXPECT_EQ(header.rfind("t_ms,l_deltoideus", 0), 0u);
  EXPECT_NE(header.find("overall"), std::string::npos);
}

TEST(Export, HeatmapJson) {
  const auto j = nlohmann::json::parse(heatmap_json(squat_result()));
  ASSERT_EQ(j["groups"].size(), 16u);
  double top = 0.0;
  for (const auto& [name, g] : j["groups"].items()) {
    EXPECT_GE(g["normalized"].get<double>(), 0.0);
    EXPECT_LE(g["normalized"].get<double>(), 1.0);
    EXPECT_EQ(g["rgb"].size(), 3u);
    top = std::max(top, g["session_normalized"].get<double>());
  }
  EXPECT_EQ(top, 1.0);
}

TEST(Export, LimbsSvg) {
  LimbWork l;
  l.left_upper = 1.0;
  l.right_upper = 2.0;
  l.left_lower = 3.0;
  l.right_lower = 4.0;
  l.overall = 10.0;
  const std::string svg = limbs_svg(l);
  EXPECT_NE(svg.find("viewBox=\"0 0 800 400\""), std::string::npos);
  for (const char* colour : {"#1f4fd8", "#1a9e3a", "#e8d020", "#d82020", "#ffffff"}) {
    EXPECT_NE(svg.find(colour), std::string::npos) << colour;
  }
  EXPECT_EQ(limbs_svg(l), svg);
}

TEST(Export, SummaryLine) {
  const std::string line = summary_line(squat_result().summary);
  EXPECT_EQ(line.rfind("overall ", 0), 0u);
  EXPECT_NE(line.find("top groups:"), std::string::npos);
  EXPECT_NE(line.find("quadriceps_femoris"), std::string::npos);
}
