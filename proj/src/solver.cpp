#include "musclework/solver.hpp"

#include "musclework/error.hpp"
#include "musclework/format.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <sstream>

namespace musclework {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd clip01(const VectorXd& u) { return u.cwiseMax(0.0).cwiseMin(1.0); }

struct DualResult {
  VectorXd lambda;
  VectorXd activations;
  int iterations = 0;
  bool converged = false;
};

/// Exact maximisation of the concave piecewise-quadratic dual along
/// lambda + t * step, t >= 0. The directional derivative is piecewise
/// linear and non-increasing in t with breakpoints where an activation
/// reaches 0 or 1; returns +inf when it never turns negative.
double exact_line_search(const VectorXd& u, const VectorXd& v, double sb, double sl, double ss, double inv_w) {
  std::vector<double> breaks;
  for (Eigen::Index m = 0; m < u.size(); ++m) {
    if (v[m] == 0.0) continue;
    for (double edge : {0.0, 1.0}) {
      const double t = (edge - u[m]) / v[m];
      if (t > 0.0) breaks.push_back(t);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(std::numeric_limits<double>::infinity());
  // phi'(t) = sb - sum v_m clip(u_m + t v_m) - (sl + t ss) / w, linear between breakpoints.
  auto derivative = [&](double t) {
    double d = sb - (sl + t * ss) * inv_w;
    for (Eigen::Index m = 0; m < u.size(); ++m) d -= v[m] * std::clamp(u[m] + t * v[m], 0.0, 1.0);
    return d;
  };
  double lo = 0.0;
  double d_lo = derivative(0.0);
  if (d_lo <= 0.0) return 0.0;
  for (double hi : breaks) {
    // Slope of phi' on (lo, hi): contributions of muscles strictly inside the box.
    const double mid = std::isinf(hi) ? lo + 1.0 : 0.5 * (lo + hi);
    double slope = -ss * inv_w;
    for (Eigen::Index m = 0; m < u.size(); ++m) {
      const double x = u[m] + mid * v[m];
      if (x > 0.0 && x < 1.0) slope -= v[m] * v[m];
    }
    if (slope < 0.0) {
      const double t = lo - d_lo / slope;
      if (t <= hi) return t;
    }
    if (std::isinf(hi)) return std::numeric_limits<double>::infinity();
    d_lo = derivative(hi);
    lo = hi;
    if (d_lo <= 0.0) return lo;
  }
  return lo;
}

/// Maximises D(l) = l'b + sum h(A'l) - |l|^2/(2w); w <= 0 means no penalty.
DualResult maximise_dual(const MatrixXd& A, const VectorXd& b, double w, VectorXd lambda, int max_iter,
                         double grad_tol) {
  const Eigen::Index rows = A.rows();
  const double inv_w = w > 0.0 ? 1.0 / w : 0.0;
  DualResult r;
  double scale = 1.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) scale = std::max(scale, A.row(i).cwiseAbs().maxCoeff());

  for (int it = 0; it < max_iter; ++it) {
    const VectorXd u = A.transpose() * lambda;
    const VectorXd a = clip01(u);
    const VectorXd grad = b - A * a - inv_w * lambda;
    r.iterations = it + 1;
    if (grad.lpNorm<Eigen::Infinity>() <= grad_tol) {
      r.converged = true;
      r.activations = a;
      r.lambda = lambda;
      return r;
    }
    MatrixXd H = MatrixXd::Zero(rows, rows);
    for (Eigen::Index m = 0; m < u.size(); ++m) {
      if (u[m] > 0.0 && u[m] < 1.0) H.noalias() += A.col(m) * A.col(m).transpose();
    }
    H.diagonal().array() += inv_w + 1e-12 * scale * scale;
    VectorXd step = H.ldlt().solve(grad);
    if (!step.allFinite() || grad.dot(step) <= 0.0) step = grad;

    const double t = exact_line_search(u, A.transpose() * step, step.dot(b), step.dot(lambda), step.squaredNorm(),
                                       inv_w);
    if (std::isinf(t)) break; // dual unbounded: no feasible activation
    if (t <= 0.0) {
      if (step == grad) break;
      // Newton direction gave no ascent; fall back to the gradient once.
      const double tg = exact_line_search(u, A.transpose() * grad, grad.dot(b), grad.dot(lambda), grad.squaredNorm(),
                                          inv_w);
      if (!(tg > 0.0) || std::isinf(tg)) break;
      lambda += tg * grad;
    } else {
      lambda += t * step;
      // Rounding floor: no representable progress. Accept when the gradient
      // is small against the magnitudes it was computed from.
      if ((t * step).lpNorm<Eigen::Infinity>() <= 1e-13 * std::max(1.0, lambda.lpNorm<Eigen::Infinity>())) {
        const double floor = 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>() + inv_w * lambda.lpNorm<Eigen::Infinity>());
        r.converged = grad.lpNorm<Eigen::Infinity>() <= floor;
        break;
      }
    }
    if (lambda.lpNorm<Eigen::Infinity>() > 1e14) break;
  }
  r.activations = clip01(A.transpose() * lambda);
  r.lambda = lambda;
  return r;
}

} // namespace

EffortSolution solve_min_effort(const MatrixXd& A, const VectorXd& b, const SolverOptions& opt) {
  EffortSolution sol;
  const Eigen::Index n = A.cols();
  if (A.rows() == 0) {
    sol.activations = VectorXd::Zero(n);
    sol.residual = VectorXd::Zero(0);
    return sol;
  }
  const double grad_tol = 1e-10 * (1.0 + b.lpNorm<Eigen::Infinity>());
  auto within_tolerance = [&](const VectorXd& res) {
    for (Eigen::Index j = 0; j < res.size(); ++j) {
      if (std::abs(res[j]) > std::max(opt.abs_tol, opt.rel_tol * std::abs(b[j]))) return false;
    }
    return true;
  };

  // Penalised dual first: always converges and warm-starts the exact solve.
  const int budget = std::max(1, opt.max_iterations);
  DualResult pen = maximise_dual(A, b, opt.penalty_weight, VectorXd::Zero(A.rows()), budget, grad_tol);
  int used = pen.iterations;
  DualResult exact = maximise_dual(A, b, 0.0, pen.lambda, std::max(1, std::min(200, budget - used)), grad_tol);
  used += exact.iterations;

  VectorXd residual = b - A * exact.activations;
  if (exact.converged || within_tolerance(residual)) {
    sol.activations = exact.activations;
    sol.residual = residual;
    sol.iterations = used;
    sol.infeasible = !within_tolerance(residual);
    if (!sol.infeasible) return sol;
  }
  if (!pen.converged && used >= budget) {
    throw SolverDiverged("static optimisation did not converge within " + std::to_string(budget) + " iterations");
  }
  sol.activations = pen.activations;
  sol.residual = b - A * pen.activations;
  sol.iterations = used;
  sol.infeasible = !within_tolerance(sol.residual);
  return sol;
}

double active_capacity(const MuscleDefinition& m, const MuscleState& s) {
  const double f_l = force_length(s.norm_length, m.hill).active;
  const double f_v = force_velocity(s.velocity, m.hill) / m.hill.f_max;
  return m.hill.f_max * f_l * f_v;
}

TorqueDistribution distribute_torques(const JointTorqueFrame& tau, const MuscleStateFrame& states,
                                      const MusculoskeletalModel& model, const SolverOptions& opt) {
  if (states.muscles.size() != model.size()) throw InvalidArgument("muscle state count does not match the model");
  if (states.t_ms != tau.t_ms) throw InvalidArgument("torque and muscle state timestamps differ");

  const std::size_t n = model.size();
  const std::vector<DofId> rows = model.actuated_dofs();
  TorqueDistribution out;
  out.activation.t_ms = tau.t_ms;
  out.force.t_ms = tau.t_ms;

  std::vector<double> passive(n), capacity(n);
  for (std::size_t m = 0; m < n; ++m) {
    passive[m] = force_length(states.muscles[m].norm_length, model.muscles[m].hill).passive;
    capacity[m] = active_capacity(model.muscles[m], states.muscles[m]);
  }

  MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const std::size_t d = index(rows[j]);
    double demand = tau.torques[d];
    for (std::size_t m = 0; m < n; ++m) {
      const double r = states.muscles[m].moment_arms[d];
      A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = r * capacity[m];
      demand -= r * passive[m];
    }
    b[static_cast<Eigen::Index>(j)] = demand;
  }

  const EffortSolution sol = solve_min_effort(A, b, opt);
  out.activation.activations.assign(sol.activations.data(), sol.activations.data() + sol.activations.size());
  out.force.forces.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double a = out.activation.activations[m];
    out.force.forces[m] = passive[m] + a * capacity[m];
    if (a >= 1.0) out.activation.saturated.push_back(model.muscles[m].name);
  }
  out.force.iterations = sol.iterations;
  out.force.infeasible = sol.infeasible;

  for (std::size_t d = 0; d < kDofCount; ++d) {
    double achieved = 0.0;
    for (std::size_t m = 0; m < n; ++m) achieved += states.muscles[m].moment_arms[d] * out.force.forces[m];
    out.force.residuals[d] = tau.torques[d] - achieved;
    const auto id = static_cast<DofId>(d);
    if (std::find(rows.begin(), rows.end(), id) == rows.end()) out.force.skipped.push_back(id);
  }
  return out;
}

WorkIncrementFrame frame_work(const MuscleForceFrame& f, double dt_s) {
  if (!(dt_s > 0.0)) throw InvalidArgument("dt must be positive");
  WorkIncrementFrame w;
  w.t_ms = f.t_ms;
  w.work.resize(f.forces.size());
  for (std::size_t m = 0; m < f.forces.size(); ++m) w.work[m] = std::max(0.0, f.forces[m]) * dt_s;
  return w;
}

std::string debug_rows(const TorqueDistribution& d, const MusculoskeletalModel& model) {
  double worst = 0.0;
  for (std::size_t j = 0; j < kDofCount; ++j) {
    const auto id = static_cast<DofId>(j);
    if (std::find(d.force.skipped.begin(), d.force.skipped.end(), id) != d.force.skipped.end()) continue;
    worst = std::max(worst, std::abs(d.force.residuals[j]));
  }
  std::ostringstream out;
  for (std::size_t m = 0; m < model.size(); ++m) {
    out << d.force.t_ms << ',' << model.muscles[m].name << ',' << fmt9(d.activation.activations[m]) << ','
        << fmt9(d.force.forces[m]) << ',' << fmt9(worst) << '\n';
  }
  return out.str();
}

} // namespace musclework
