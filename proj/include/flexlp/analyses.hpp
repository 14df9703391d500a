#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "flexlp/stepper.hpp"

namespace flexlp {

/// Weight v on the translation DOFs of the listed bodies (all free bodies
/// when the list is empty).
struct DirectionGoal {
  Vec2 direction{1.0, 0.0};
  std::vector<std::size_t> bodies;
};

/// Unit vector from center to each free body's centroid.
struct RadialGoal {
  Vec2 center = Vec2::Zero();
};

/// -sign(x_i - x_leader) on every free body's dx, using centroids.
struct LeaderXGoal {
  std::size_t leader = 0;
};

using Goal = std::variant<DirectionGoal, RadialGoal, LeaderXGoal>;

/// Throws InputError for missing or fixed bodies and for an all-zero result.
Objective make_objective(const Scene& scene, const Goal& goal);

/// Centroid of the union of every body, area weighted.
Vec2 scene_centroid(const Scene& scene);

struct ToleranceQuery {
  double t_max = 0.0;
  Goal goal;
  /// Body whose local point is tracked; the metric is that point's
  /// displacement magnitude between the initial and flexed scenes.
  std::size_t track_body = 0;
  /// Defaults to the centroid of the un-inset polygon.
  std::optional<Vec2> track_point;
  double threshold = 0.0;
  double bisection_tolerance = 1e-4;
  StepParams params;
};

struct ToleranceProbe {
  double t = 0.0;
  double metric = 0.0;
};

struct ToleranceResult {
  double t_star = 0.0;
  std::vector<ToleranceProbe> probes;  // in evaluation order
  /// False when a larger inset was seen to flex less than a smaller one.
  bool monotone = true;
};

/// Flex metric with every free polygon inset by t.
double tolerance_metric(const Scene& scene, const ToleranceQuery& query, double t);

/// Largest inset t in [0, t_max] whose metric stays within the threshold,
/// assuming the metric does not decrease with t. Returns 0 when even t = 0
/// exceeds the threshold.
ToleranceResult tolerance_search(const Scene& scene, const ToleranceQuery& query);

struct CrossBeam {
  VertexRef a;
  VertexRef b;
  double initial_distance = 0.0;
  double flexed_distance = 0.0;
  double change = 0.0;  // |flexed - initial|
};

/// Mutually visible vertex pair (in the initial scene) whose distance
/// changed the most. Ties keep the first pair in enumeration order.
CrossBeam suggest_cross_beam(const Scene& initial, const Scene& flexed);

}  // namespace flexlp
