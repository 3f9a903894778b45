#pragma once

#include "musclework/muscle_model.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace musclework {

struct SolverOptions {
  double penalty_weight = 1e6; // used only when the exact problem is infeasible
  int max_iterations = 10000;
  double abs_tol = 1e-6; // N*m
  double rel_tol = 1e-4;
};

/// min sum(a^2) s.t. A a = b, 0 <= a <= 1. Rows are DOFs, columns muscles
/// (A = moment arm * active capacity).
struct EffortSolution {
  Eigen::VectorXd activations;
  Eigen::VectorXd residual; // b - A a
  int iterations = 0;
  bool infeasible = false;
};

/// Dual semismooth Newton: the dual of the box-constrained problem is a
/// concave piecewise quadratic in one multiplier per row, maximised with
/// a damped Newton step. When the exact dual does not converge the equality
/// constraints are replaced by a quadratic penalty (weight `penalty_weight`)
/// and the same dual, now strongly concave, is solved instead.
EffortSolution solve_min_effort(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolverOptions& opt = {});

struct ActivationFrame {
  std::int64_t t_ms = 0;
  std::vector<double> activations;
  std::vector<std::string> saturated; // muscles at the upper bound
};

struct MuscleForceFrame {
  std::int64_t t_ms = 0;
  std::vector<double> forces;   // N, >= 0
  DofVector residuals{};        // tau - achieved, per DOF
  std::vector<DofId> skipped;   // DOFs no muscle crosses
  int iterations = 0;
  bool infeasible = false;
};

struct TorqueDistribution {
  ActivationFrame activation;
  MuscleForceFrame force;
};

/// Static optimisation for one frame. Passive forces are subtracted from the
/// demand before optimising; forces are never negative.
TorqueDistribution distribute_torques(const JointTorqueFrame& tau, const MuscleStateFrame& states,
                                      const MusculoskeletalModel& model, const SolverOptions& opt = {});

/// Active capacity c_m = f_max * f_L * f_V for one muscle state.
double active_capacity(const MuscleDefinition& m, const MuscleState& s);

struct WorkIncrementFrame {
  std::int64_t t_ms = 0;
  std::vector<double> work; // N*s per muscle
};

WorkIncrementFrame frame_work(const MuscleForceFrame& f, double dt_s);

/// CSV rows "t_ms,muscle,a,F,residual" for the debug dump; residual is the
/// largest absolute DOF residual of the frame.
std::string debug_rows(const TorqueDistribution& d, const MusculoskeletalModel& model);

} // namespace musclework
