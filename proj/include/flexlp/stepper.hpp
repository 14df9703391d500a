#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flexlp/lp.hpp"

namespace flexlp {

struct StepParams {
  /// Largest constraint violation an accepted step may leave behind.
  double eta = 1e-3;
  /// Multipliers tried in increasing order by the line search.
  std::vector<double> scales{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0, 2.0, 4.0};
  int max_iters = 50;
  /// Stop once an iteration's realised gain falls below this times the
  /// structure diameter.
  double gain_tolerance = 1e-6;
  /// Trust-region halvings tried before declaring a stall.
  int max_bound_shrinks = 8;
};

void validate_params(const StepParams& params);

enum class StepStatus { converged, max_iters, lp_unbounded, lp_infeasible, stalled };

const char* to_string(StepStatus status);

struct StepRecord {
  double lp_objective = 0.0;
  double scale = 0.0;
  double gain = 0.0;
  double violation = 0.0;
  std::vector<Pose> poses;
};

struct PhaseTimes {
  double assemble = 0.0;
  double solve = 0.0;
  double line_search = 0.0;
};

struct StepTrace {
  std::vector<StepRecord> iterations;
  StepStatus status = StepStatus::converged;
  Scene final_scene;
  PhaseTimes seconds;
  Eigen::Index jacobian_rows = 0;  // first iteration
  Eigen::Index jacobian_cols = 0;

  double cumulative_objective() const;
};

/// Euler update of every free body; fixed bodies are untouched.
Scene apply_displacement(const Scene& scene, const Displacement& dq, double scale);

/// Scene with every body moved to the given poses.
Scene with_poses(const Scene& scene, const std::vector<Pose>& poses);
std::vector<Pose> poses_of(const Scene& scene);

/// Deepest penetration over every body pair with a free member, measured as
/// the distance of the deepest vertex to the other polygon's boundary.
double max_violation(const Scene& scene);

/// Walks the scale grid upward and returns the last multiplier whose step
/// keeps `acceptable` true; 0 when the smallest already fails. Multipliers
/// that would leave `trust` are skipped.
double line_search(const Scene& scene, const Displacement& dq, const StepParams& params,
                   const std::function<bool(const Scene&)>& acceptable, const Bounds* trust = nullptr);

/// Line search with the default criterion max_violation <= eta.
double line_search(const Scene& scene, const Displacement& dq, const StepParams& params,
                   const Bounds* trust = nullptr);

/// assemble -> solve_flex -> line_search -> apply, until the realised gain
/// drops below tolerance or max_iters is reached.
StepTrace flex_iterate(const Scene& scene, const Objective& objective, const StepParams& params = {});

}  // namespace flexlp
