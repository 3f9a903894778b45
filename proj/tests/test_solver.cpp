#include "oracles.hpp"
#include "support.hpp"

#include "musclework/error.hpp"
#include "musclework/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace musclework;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MusculoskeletalModel lever_model(int muscles, double f_max) {
  MusculoskeletalModel m;
  for (int i = 0; i < muscles; ++i) {
    m.muscles.push_back(mwtest::toy_muscle("m" + std::to_string(i), MuscleGroup::BicepsBrachiiBrachialis, Side::Left,
                                           {{SegmentId::UpperArmL, Vec3(0, -0.2, 0.02)}, {SegmentId::ForearmL, Vec3(0, -0.05, 0.01)}},
                                           {DofId::ElbowFlexionL}, f_max, 0.2));
  }
  return m;
}

MuscleStateFrame lever_states(int muscles, double r) {
  MuscleStateFrame s;
  s.muscles.resize(static_cast<std::size_t>(muscles));
  for (auto& st : s.muscles) {
    st.norm_length = 1.0;
    st.moment_arms[index(DofId::ElbowFlexionL)] = r;
  }
  return s;
}

JointTorqueFrame elbow_torque(double tau) {
  JointTorqueFrame t;
  t.torques[index(DofId::ElbowFlexionL)] = tau;
  return t;
}

} // namespace

TEST(MinEffort, SingleMuscleOneDof) {
  const auto d = distribute_torques(elbow_torque(15.0), lever_states(1, 0.05), lever_model(1, 600.0));
  ASSERT_EQ(d.activation.activations.size(), 1u);
  EXPECT_NEAR(d.activation.activations[0], 0.5, 1e-9);
  EXPECT_NEAR(d.force.forces[0], 300.0, 1e-6);
  EXPECT_FALSE(d.force.infeasible);
  EXPECT_NEAR(d.force.residuals[index(DofId::ElbowFlexionL)], 0.0, 1e-6);
}

TEST(MinEffort, IdenticalMusclesShareEqually) {
  const auto d = distribute_torques(elbow_torque(20.0), lever_states(2, 0.05), lever_model(2, 600.0));
  EXPECT_NEAR(d.activation.activations[0], d.activation.activations[1], 1e-9);
  EXPECT_NEAR(d.activation.activations[0], 20.0 / (2 * 0.05 * 600.0), 1e-9);
}

TEST(MinEffort, SkippedDofsReported) {
  const auto d = distribute_torques(elbow_torque(1.0), lever_states(1, 0.05), lever_model(1, 600.0));
  EXPECT_EQ(d.force.skipped.size(), kDofCount - 1);
}

TEST(MinEffort, ForcesNeverNegative) {
  // Demand opposite to the only muscle: activation stays at zero.
  const auto d = distribute_torques(elbow_torque(-5.0), lever_states(1, 0.05), lever_model(1, 600.0));
  EXPECT_EQ(d.activation.activations[0], 0.0);
  EXPECT_GE(d.force.forces[0], 0.0);
  EXPECT_TRUE(d.force.infeasible);
  EXPECT_NEAR(d.force.residuals[index(DofId::ElbowFlexionL)], -5.0, 1e-9);
}

TEST(MinEffort, SaturationFlaggedWhenOverCapacity) {
  const auto d = distribute_torques(elbow_torque(100.0), lever_states(1, 0.05), lever_model(1, 600.0));
  EXPECT_NEAR(d.activation.activations[0], 1.0, 1e-9);
  EXPECT_TRUE(d.force.infeasible);
  ASSERT_EQ(d.activation.saturated.size(), 1u);
}

TEST(MinEffort, PassiveForceReducesDemand) {
  auto st = lever_states(1, 0.05);
  st.muscles[0].norm_length = 1.2;
  const auto model = lever_model(1, 600.0);
  const double passive = force_length(1.2, model.muscles[0].hill).passive;
  const double cap = 600.0 * force_length(1.2, model.muscles[0].hill).active;
  const auto d = distribute_torques(elbow_torque(15.0), st, model);
  EXPECT_NEAR(d.activation.activations[0], (15.0 - 0.05 * passive) / (0.05 * cap), 1e-9);
  EXPECT_NEAR(d.force.forces[0], 15.0 / 0.05, 1e-6);
}

TEST(MinEffort, MismatchedInputs) {
  EXPECT_THROW(distribute_torques(elbow_torque(1.0), lever_states(2, 0.05), lever_model(1, 600.0)), InvalidArgument);
  auto t = elbow_torque(1.0);
  t.t_ms = 5;
  EXPECT_THROW(distribute_torques(t, lever_states(1, 0.05), lever_model(1, 600.0)), InvalidArgument);
}

TEST(MinEffort, MatchesGridOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> arm(-0.06, 0.06), cap(200.0, 1500.0), act(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int rows = 1 + trial % 2, n = rows + 1;
    MatrixXd A(rows, n);
    for (int j = 0; j < rows; ++j) {
      for (int m = 0; m < n; ++m) A(j, m) = arm(rng) * cap(rng);
    }
    VectorXd truth(n);
    for (int m = 0; m < n; ++m) truth[m] = act(rng);
    const VectorXd b = A * truth;
    const EffortSolution sol = solve_min_effort(A, b);
    const mwtest::GridResult grid = mwtest::grid_min_effort(A, b);
    ASSERT_TRUE(grid.found);
    for (int m = 0; m < n; ++m) EXPECT_NEAR(sol.activations[m], grid.a[m], 0.01) << "trial " << trial;
    EXPECT_LE((b - A * sol.activations).lpNorm<Eigen::Infinity>(), std::max(1e-6, 1e-4 * b.norm()));
    EXPECT_FALSE(sol.infeasible);
  }
}

TEST(MinEffort, InfeasibleFallsBackToPenalty) {
  MatrixXd A(2, 2);
  A << 30.0, 0.0, 0.0, 30.0;
  VectorXd b(2);
  b << 45.0, 15.0;
  const EffortSolution sol = solve_min_effort(A, b);
  EXPECT_TRUE(sol.infeasible);
  EXPECT_NEAR(sol.activations[0], 1.0, 1e-6);
  EXPECT_NEAR(sol.activations[1], 0.5, 1e-6);
  EXPECT_NEAR(sol.residual[0], 15.0, 1e-4);
}

TEST(MinEffort, ZeroDemand) {
  MatrixXd A(1, 3);
  A << 10.0, -5.0, 7.0;
  const EffortSolution sol = solve_min_effort(A, VectorXd::Zero(1));
  EXPECT_NEAR(sol.activations.norm(), 0.0, 1e-12);
}

TEST(FrameWork, ForceTimesStep) {
  MuscleForceFrame f;
  f.t_ms = 16;
  f.forces = {100.0, 0.0};
  const WorkIncrementFrame w = frame_work(f, 1.0 / 60);
  EXPECT_NEAR(w.work[0], 100.0 / 60, 1e-15);
  EXPECT_EQ(w.work[1], 0.0);
  EXPECT_EQ(w.t_ms, 16);
  EXPECT_THROW(frame_work(f, 0.0), InvalidArgument);
}

TEST(FrameWork, StaticHoldIntegratesToForce) {
  const auto model = lever_model(1, 600.0);
  const auto states = lever_states(1, 0.05);
  double total = 0.0, force = 0.0;
  for (int i = 0; i < 60; ++i) {
    const auto d = distribute_torques(elbow_torque(12.0), states, model);
    force = d.force.forces[0];
    for (double w : frame_work(d.force, 1.0 / 60).work) total += w;
  }
  EXPECT_NEAR(total, force * 1.0, 1e-9);
  EXPECT_NEAR(force, 240.0, 1e-6);
}

TEST(DebugRows, OneRowPerMuscle) {
  const auto model = lever_model(2, 600.0);
  const auto d = distribute_torques(elbow_torque(6.0), lever_states(2, 0.05), model);
  const std::string rows = debug_rows(d, model);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 2);
  EXPECT_EQ(rows.rfind("0,m0,", 0), 0u);
}
