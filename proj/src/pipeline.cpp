#include "musclework/pipeline.hpp"

#include "musclework/error.hpp"
#include "musclework/log.hpp"

#include <algorithm>

namespace musclework {

SessionResult analyze_session(const SessionStream& raw, const MusculoskeletalModel& model,
                              const PipelineOptions& opt) {
  if (raw.empty()) throw ParseError("no frames", 0);
  double mass = 70.0;
  if (opt.mass_kg) {
    mass = *opt.mass_kg;
  } else {
    log().warn("no subject mass given, assuming 70 kg");
  }

  SessionStream s = resample(raw, opt.rate_hz);
  SessionResult out;
  // bone lengths from unsmoothed positions; averaging a moving joint shortens bones
  out.scale = estimate_body_scale(s);
  if (opt.smooth_window > 1) s = smooth(s, opt.smooth_window);
  const double dt = 1.0 / opt.rate_hz;
  const double length_scale = out.scale.stature / BodyScale::reference().stature;

  std::vector<JointAngleFrame> q;
  q.reserve(s.size());
  for (const auto& f : s.frames) q.push_back(compute_joint_angles(f));
  differentiate(q, dt);

  WindowDisplay display(opt.display);
  SessionAccumulator acc(model, dt);
  if (opt.keep_frames) {
    out.groups.reserve(q.size());
    out.limbs.reserve(q.size());
    out.display.reserve(q.size());
  }
  for (const auto& frame : q) {
    const JointTorqueFrame tau = inverse_dynamics(frame, mass, out.scale, opt.segments);
    const MuscleStateFrame states = compute_muscle_states(model, frame, out.scale, length_scale);
    const TorqueDistribution dist = distribute_torques(tau, states, model, opt.solver);
    if (out.skipped_dofs.empty()) out.skipped_dofs = dist.force.skipped;
    const WorkIncrementFrame w = frame_work(dist.force, dt);
    const GroupWorkFrame g = group_frame(w, model);
    const DisplayFrame d = display.push(g);
    acc.add(w, g, d, dist.force.infeasible);
    if (opt.keep_frames) {
      out.groups.push_back(g);
      out.limbs.push_back(limb_frame(g));
      out.display.push_back(d);
    }
  }
  out.summary = acc.summary();
  if (out.summary.infeasible_frames > 0) {
    log().warn("{} of {} frames could not meet the torque demand exactly", out.summary.infeasible_frames,
               out.summary.frame_count);
  }
  return out;
}

} // namespace musclework
