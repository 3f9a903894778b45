#include "support.hpp"

#include "musclework/error.hpp"
#include "musclework/muscle_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

using namespace musclework;
using mwtest::default_model;
using mwtest::toy_muscle;

namespace {

constexpr double kPi = std::numbers::pi;

nlohmann::json default_model_json() {
  std::ifstream in(std::string(MUSCLEWORK_DATA_DIR) + "/default_model.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return nlohmann::json::parse(ss.str());
}

nlohmann::json small_model(double pcsa) {
  nlohmann::json doc = default_model_json();
  doc["specific_tension"] = 30.0;
  doc["muscles"][0]["pcsa_cm2"] = pcsa;
  return doc;
}

} // namespace

TEST(ModelFile, DefaultModelLoads) {
  const auto& m = default_model();
  EXPECT_EQ(m.size(), 24u);
  for (std::size_t g = 0; g < kMuscleGroupCount; ++g) {
    for (Side s : {Side::Left, Side::Right}) {
      int lines = 0;
      for (const auto& mu : m.muscles) lines += (static_cast<std::size_t>(mu.group) == g && mu.side == s);
      EXPECT_GE(lines, 1);
      EXPECT_LE(lines, 2);
    }
  }
  for (const auto& mu : m.muscles) EXPECT_NO_THROW(mu.hill.validate());
  EXPECT_FALSE(m.version.empty());
}

TEST(ModelFile, MissingGroupRejected) {
  nlohmann::json doc = default_model_json();
  auto& arr = doc["muscles"];
  for (std::size_t i = arr.size(); i-- > 0;) {
    if (arr[i]["group"] == "gluteus_maximus" && arr[i]["side"] == "L") arr.erase(i);
  }
  EXPECT_THROW(load_model(doc.dump()), UncoveredGroup);
}

TEST(ModelFile, PcsaGivesMaxForce) {
  const MusculoskeletalModel m = load_model(small_model(20.0).dump());
  EXPECT_DOUBLE_EQ(m.muscles[0].hill.f_max, 600.0);
}

TEST(ModelFile, SchemaErrors) {
  EXPECT_THROW(load_model("{"), SchemaError);
  nlohmann::json dup = default_model_json();
  dup["muscles"].push_back(dup["muscles"][0]);
  EXPECT_THROW(load_model(dup.dump()), DuplicateMuscle);
  nlohmann::json seg = default_model_json();
  seg["muscles"][0]["attachments"][0]["segment"] = "tail";
  EXPECT_THROW(load_model(seg.dump()), SchemaError);
  nlohmann::json dof = default_model_json();
  dof["muscles"][0]["spanned_dofs"] = {"wrist_flexion_l"};
  EXPECT_THROW(load_model(dof.dump()), SchemaError);
  nlohmann::json neg = small_model(-3.0);
  EXPECT_THROW(load_model(neg.dump()), SchemaError);
}

TEST(MuscleLength, StraightAndCollinear) {
  const Pose p = forward_pose(JointAngleFrame{}.angles, BodyScale::reference());
  const auto two = toy_muscle("a", MuscleGroup::Deltoideus, Side::Left,
                              {{SegmentId::UpperArmL, Vec3(0, 0, 0)}, {SegmentId::UpperArmL, Vec3(0, -0.3, 0)}},
                              {DofId::ShoulderFlexionL});
  EXPECT_NEAR(muscle_length(two, p), 0.3, 1e-12);
  const auto three = toy_muscle("b", MuscleGroup::Deltoideus, Side::Left,
                                {{SegmentId::ThighL, Vec3(0, 0, 0)},
                                 {SegmentId::ThighL, Vec3(0, -0.2, 0)},
                                 {SegmentId::ThighL, Vec3(0, -0.5, 0)}},
                                {DofId::HipFlexionL});
  EXPECT_NEAR(muscle_length(three, p), 0.5, 1e-12);
}

TEST(MuscleLength, ElbowFlexorShortens) {
  const auto& m = default_model();
  const BodyScale s = BodyScale::reference();
  for (const char* name : {"biceps_brachii_l", "brachialis_l", "biceps_brachii_r", "brachialis_r"}) {
    const auto& mu = m.muscles[*m.find(name)];
    JointAngleFrame q;
    const double straight = muscle_length(mu, forward_pose(q.angles, s));
    q.angle(mu.side == Side::Left ? DofId::ElbowFlexionL : DofId::ElbowFlexionR) = kPi / 2;
    EXPECT_LT(muscle_length(mu, forward_pose(q.angles, s)), straight) << name;
  }
}

TEST(MuscleLength, MissingSegment) {
  Pose p = forward_pose(JointAngleFrame{}.angles, BodyScale::reference());
  p.present &= ~(1u << index(SegmentId::ForearmR));
  const auto& m = default_model();
  EXPECT_THROW(muscle_length(m.muscles[*m.find("brachialis_r")], p), MissingSegment);
}

TEST(MomentArm, PinJointLawOfCosines) {
  // Origin on the upper-arm axis p above the elbow, insertion q down the forearm.
  const BodyScale s = BodyScale::reference();
  const double lu = s.length(JointId::ElbowL);
  const double p = 0.12, q = 0.05;
  const auto m = toy_muscle("pin", MuscleGroup::BicepsBrachiiBrachialis, Side::Left,
                            {{SegmentId::UpperArmL, Vec3(0, -lu + p, 0)}, {SegmentId::ForearmL, Vec3(0, -q, 0)}},
                            {DofId::ElbowFlexionL});
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double e = 0.05 + 2.9 * k / 49.0;
    JointAngleFrame a;
    a.angle(DofId::ElbowFlexionL) = e;
    const double l = std::sqrt(p * p + q * q + 2 * p * q * std::cos(e));
    const double d = p * q * std::sin(e) / l;
    worst = std::max(worst, std::abs(moment_arm(m, a.angles, s, DofId::ElbowFlexionL) - d));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(MomentArm, UncrossedDofIsZero) {
  const auto m = toy_muscle("arm", MuscleGroup::TricepsBrachii, Side::Left,
                            {{SegmentId::UpperArmL, Vec3(0, -0.1, -0.02)}, {SegmentId::ForearmL, Vec3(0, 0.02, -0.02)}},
                            {DofId::ElbowFlexionL, DofId::KneeFlexionL});
  JointAngleFrame a;
  a.angle(DofId::ElbowFlexionL) = 1.0;
  a.angle(DofId::KneeFlexionL) = 0.5;
  EXPECT_NEAR(moment_arm(m, a.angles, BodyScale::reference(), DofId::KneeFlexionL), 0.0, 1e-9);
  EXPECT_THROW(moment_arm(m, a.angles, BodyScale::reference(), DofId::HipFlexionL), DofNotSpanned);
}

TEST(MomentArm, MirroredAttachmentNegates) {
  const BodyScale s = BodyScale::reference();
  const double lu = s.length(JointId::ElbowL);
  const auto front = toy_muscle("f", MuscleGroup::BicepsBrachiiBrachialis, Side::Left,
                                {{SegmentId::UpperArmL, Vec3(0, -lu + 0.1, 0.03)}, {SegmentId::ForearmL, Vec3(0, -0.04, 0.02)}},
                                {DofId::ElbowFlexionL});
  const auto back = toy_muscle("b", MuscleGroup::TricepsBrachii, Side::Left,
                               {{SegmentId::UpperArmL, Vec3(0, -lu + 0.1, -0.03)}, {SegmentId::ForearmL, Vec3(0, 0.04, -0.02)}},
                               {DofId::ElbowFlexionL});
  JointAngleFrame a;
  const double rf = moment_arm(front, a.angles, s, DofId::ElbowFlexionL);
  const double rb = moment_arm(back, a.angles, s, DofId::ElbowFlexionL);
  EXPECT_GT(rf, 0.0);
  EXPECT_LT(rb, 0.0);
  const auto mirrored = toy_muscle("m", MuscleGroup::TricepsBrachii, Side::Left,
                                   {{SegmentId::UpperArmL, Vec3(0, -lu + 0.1, -0.03)}, {SegmentId::ForearmL, Vec3(0, -0.04, -0.02)}},
                                   {DofId::ElbowFlexionL});
  const auto original = toy_muscle("o", MuscleGroup::TricepsBrachii, Side::Left,
                                   {{SegmentId::UpperArmL, Vec3(0, -lu + 0.1, 0.03)}, {SegmentId::ForearmL, Vec3(0, -0.04, 0.02)}},
                                   {DofId::ElbowFlexionL});
  a.angle(DofId::ElbowFlexionL) = 0.0;
  EXPECT_NEAR(moment_arm(mirrored, a.angles, s, DofId::ElbowFlexionL),
              -moment_arm(original, a.angles, s, DofId::ElbowFlexionL), 1e-9);
}

TEST(ForceVelocity, ClosedFormPoints) {
  const HillParameters p = HillParameters::with_defaults(800.0, 0.12);
  EXPECT_EQ(force_velocity(0.0, p), p.f_max);
  EXPECT_NEAR(force_velocity(p.v_max, p), 0.0, 1e-9 * p.f_max);
  EXPECT_NEAR(force_velocity(0.25 * p.v_max, p), 0.375 * p.f_max, 1e-9 * p.f_max);
  EXPECT_EQ(force_velocity(-0.3, p), p.f_max);
  EXPECT_EQ(force_velocity(2.0 * p.v_max, p), 0.0);
}

TEST(ForceLength, CurvePoints) {
  const HillParameters p = HillParameters::with_defaults(1000.0, 0.1);
  const ForceLength opt = force_length(1.0, p);
  EXPECT_EQ(opt.active, 1.0);
  EXPECT_EQ(opt.passive, 0.0);
  EXPECT_NEAR(force_length(0.55, p).active, std::exp(-1.0), 1e-12);
  EXPECT_NEAR(force_length(1.2, p).passive, 1000.0 * 0.05 * (std::exp(1.0) - 1.0), 1e-9);
  EXPECT_EQ(force_length(0.8, p).passive, 0.0);
}

TEST(HillParameters, Invariant) {
  HillParameters p = HillParameters::with_defaults(500.0, 0.2);
  EXPECT_NEAR(p.a * p.v_max, p.b * p.f_max, 1e-9);
  EXPECT_NO_THROW(p.validate());
  p.b *= 2.0;
  EXPECT_THROW(p.validate(), SchemaError);
}

TEST(MuscleStates, StandingDefaultModel) {
  const auto& m = default_model();
  JointAngleFrame q;
  q.velocities[index(DofId::ElbowFlexionL)] = 1.0;
  const MuscleStateFrame st = compute_muscle_states(m, q, BodyScale::reference());
  ASSERT_EQ(st.muscles.size(), m.size());
  const auto bi = *m.find("brachialis_l");
  EXPECT_GT(st.muscles[bi].moment_arms[index(DofId::ElbowFlexionL)], 0.0);
  EXPECT_NEAR(st.muscles[bi].velocity, st.muscles[bi].moment_arms[index(DofId::ElbowFlexionL)], 1e-12);
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_GT(st.muscles[i].norm_length, 0.5) << m.muscles[i].name;
    EXPECT_LT(st.muscles[i].norm_length, 1.5) << m.muscles[i].name;
  }
}

TEST(MuscleStates, LengthScaleNormalises) {
  const auto& m = default_model();
  const BodyScale big = BodyScale::reference().scaled(1.1);
  const MuscleStateFrame a = compute_muscle_states(m, JointAngleFrame{}, BodyScale::reference());
  const MuscleStateFrame b = compute_muscle_states(m, JointAngleFrame{}, big, 1.1);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(a.muscles[i].norm_length, b.muscles[i].norm_length, 1e-9);
}

TEST(ModelSymmetry, MirroredSidesMatch) {
  const auto& m = default_model();
  JointAngleFrame q;
  q.angle(DofId::HipFlexionL) = q.angle(DofId::HipFlexionR) = 0.6;
  q.angle(DofId::ShoulderFlexionL) = q.angle(DofId::ShoulderFlexionR) = 1.0;
  const MuscleStateFrame st = compute_muscle_states(m, q, BodyScale::reference());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& mu = m.muscles[i];
    if (mu.side != Side::Left) continue;
    const std::string twin = mu.name.substr(0, mu.name.size() - 1) + "r";
    const auto j = m.find(twin);
    ASSERT_TRUE(j.has_value()) << twin;
    EXPECT_NEAR(st.muscles[i].length, st.muscles[*j].length, 1e-12) << mu.name;
  }
}
