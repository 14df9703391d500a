#include "flexlp/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace flexlp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool within(const Bounds& trust, const Displacement& dq, double scale) {
  for (Eigen::Index j = 0; j < dq.size(); ++j) {
    const double v = scale * dq(j);
    if (v > trust.upper(j) * (1.0 + 1e-12) + 1e-15 || v < trust.lower(j) * (1.0 + 1e-12) - 1e-15) return false;
  }
  return true;
}

}  // namespace

void validate_params(const StepParams& params) {
  if (!(params.eta > 0.0)) throw InputError("eta must be positive");
  if (params.max_iters < 1) throw InputError("max_iters must be at least 1");
  if (params.scales.empty()) throw InputError("scale grid is empty");
  for (std::size_t i = 0; i < params.scales.size(); ++i) {
    if (!(params.scales[i] > 0.0)) throw InputError("scale multipliers must be positive");
    if (i > 0 && !(params.scales[i] > params.scales[i - 1]))
      throw InputError("scale multipliers must be increasing");
  }
}

const char* to_string(StepStatus status) {
  switch (status) {
    case StepStatus::converged:
      return "converged";
    case StepStatus::max_iters:
      return "max_iters";
    case StepStatus::lp_unbounded:
      return "lp_unbounded";
    case StepStatus::lp_infeasible:
      return "lp_infeasible";
    case StepStatus::stalled:
      return "stalled";
  }
  return "unknown";
}

double StepTrace::cumulative_objective() const {
  double total = 0.0;
  for (const StepRecord& r : iterations) total += r.gain;
  return total;
}

Scene apply_displacement(const Scene& scene, const Displacement& dq, double scale) {
  const std::vector<int> cols = column_blocks(scene);
  if (dq.size() != static_cast<Eigen::Index>(dof_count(scene)))
    throw InputError("displacement length does not match the scene's free DOFs");
  Scene out = scene;
  for (std::size_t i = 0; i < out.bodies.size(); ++i) {
    if (cols[i] < 0) continue;
    Pose& p = out.bodies[i].pose;
    p.x += scale * dq(cols[i]);
    p.y += scale * dq(cols[i] + 1);
    p.theta += scale * dq(cols[i] + 2);
  }
  return out;
}

Scene with_poses(const Scene& scene, const std::vector<Pose>& poses) {
  if (poses.size() != scene.bodies.size()) throw InputError("pose count does not match body count");
  Scene out = scene;
  for (std::size_t i = 0; i < poses.size(); ++i) out.bodies[i].pose = poses[i];
  return out;
}

std::vector<Pose> poses_of(const Scene& scene) {
  std::vector<Pose> poses;
  poses.reserve(scene.bodies.size());
  for (const Body& b : scene.bodies) poses.push_back(b.pose);
  return poses;
}

double max_violation(const Scene& scene) { return max_overlap(scene).depth; }

double line_search(const Scene& scene, const Displacement& dq, const StepParams& params,
                   const std::function<bool(const Scene&)>& acceptable, const Bounds* trust) {
  double accepted = 0.0;
  for (double s : params.scales) {
    if (trust && !within(*trust, dq, s)) break;
    if (!acceptable(apply_displacement(scene, dq, s))) break;
    accepted = s;
  }
  return accepted;
}

double line_search(const Scene& scene, const Displacement& dq, const StepParams& params, const Bounds* trust) {
  return line_search(
      scene, dq, params, [&](const Scene& s) { return max_violation(s) <= params.eta; }, trust);
}

StepTrace flex_iterate(const Scene& scene, const Objective& objective, const StepParams& params) {
  validate_scene(scene);
  validate_params(params);
  validate_objective(objective, static_cast<Eigen::Index>(dof_count(scene)));

  StepTrace trace;
  Scene current = scene;
  const Bounds bounds = default_bounds(scene);
  const double tolerance = params.gain_tolerance * std::max(structure_diameter(scene), 1e-12);
  // Accepted steps may leave up to eta of overlap. Later assemblies accept
  // it and treat those pairs as touching, so the LP never has to undo it.
  SelectionOptions relaxed;
  relaxed.penetration_tolerance = std::max(kPenetrationTolerance, 2.0 * params.eta);

  for (int iter = 0; iter < params.max_iters; ++iter) {
    auto t0 = Clock::now();
    const DistanceSystem system = iter == 0 ? assemble(current) : assemble(current, relaxed);
    trace.seconds.assemble += seconds_since(t0);
    if (iter == 0) {
      trace.jacobian_rows = system.rows();
      trace.jacobian_cols = system.cols();
    }

    Bounds trust = bounds;
    LpResult lp;
    double scale = 0.0;
    for (int shrink = 0; shrink <= params.max_bound_shrinks; ++shrink) {
      t0 = Clock::now();
      lp = solve_flex(system, objective, trust);
      trace.seconds.solve += seconds_since(t0);
      if (lp.status == LpStatus::unbounded) {
        trace.status = StepStatus::lp_unbounded;
        trace.final_scene = current;
        return trace;
      }
      if (lp.status == LpStatus::infeasible) {
        trace.status = StepStatus::lp_infeasible;
        trace.final_scene = current;
        return trace;
      }
      t0 = Clock::now();
      scale = line_search(current, lp.displacement, params, &trust);
      trace.seconds.line_search += seconds_since(t0);
      if (scale > 0.0) break;
      trust = scale_bounds(trust, 0.5);
    }
    if (scale == 0.0) {
      trace.status = StepStatus::stalled;
      trace.final_scene = current;
      return trace;
    }

    current = apply_displacement(current, lp.displacement, scale);
    StepRecord rec;
    rec.lp_objective = lp.objective;
    rec.scale = scale;
    rec.gain = scale * lp.objective;
    rec.violation = max_violation(current);
    rec.poses = poses_of(current);
    trace.iterations.push_back(std::move(rec));

    if (std::abs(trace.iterations.back().gain) < tolerance) {
      trace.status = StepStatus::converged;
      trace.final_scene = current;
      return trace;
    }
  }
  trace.status = StepStatus::max_iters;
  trace.final_scene = current;
  return trace;
}

}  // namespace flexlp
