#pragma once

#include <optional>
#include <vector>

#include "flexlp/stepper.hpp"

namespace flexlp {

/// Viewing cone in the robot's local frame. half_angle is in (0, pi/2].
struct Camera {
  Vec2 apex = Vec2::Zero();
  Vec2 forward{0.0, 1.0};
  double half_angle = 1.0;
};

struct RobotSpec {
  std::size_t body = 0;
  /// Robot whose marker this one must keep in view; empty for the leader.
  std::optional<std::size_t> predecessor;
  Camera camera;
  Vec2 marker = Vec2::Zero();  // local point others watch
};

struct FlockSpec {
  std::vector<RobotSpec> robots;
  std::size_t leader = 0;  // index into robots
  int neighbors = 5;
  double rotation_cap = 0.1;
  /// Half-width of the square the leader's origin must stay in, centred on
  /// its initial position.
  double leader_box = 1.0;
  /// Distance kept between neighbours and to cone edges where possible.
  double clearance = 0.01;
};

/// Checks the tree structure, parameters, robot bodies, and that every
/// marker starts inside its observer's cone. Throws InputError.
void validate_flock(const FlockSpec& spec, const Scene& scene);

/// Signed distances of the predecessor's marker from the two cone edges of
/// robot `robot` (in view when both are >= -1e-9).
std::pair<double, double> cone_margins(const FlockSpec& spec, const Scene& scene, std::size_t robot);
bool markers_in_cones(const FlockSpec& spec, const Scene& scene);

/// Indices (into spec.robots) of the k nearest robots by centroid distance.
std::vector<std::size_t> nearest_robots(const FlockSpec& spec, const Scene& scene, std::size_t robot);

/// Neighbour half-plane pairs: every vertex of each robot against the edge
/// of each of its k nearest robots that it is furthest outside of, in both
/// directions. Robots are assumed convex.
std::vector<ConstraintPair> neighbour_pairs(const FlockSpec& spec, const Scene& scene);

/// Cone rows, rotation caps, and the leader box as rows * dq + offset >= 0.
AuxRows flock_aux_rows(const FlockSpec& spec, const Scene& scene, const Vec2& leader_center);

/// Neighbour rows stacked on the auxiliary rows; all offsets relaxed by the
/// clearance where they exceed it.
AuxRows flock_constraints(const FlockSpec& spec, const Scene& scene, const Vec2& leader_center);

/// Robot centroid x range.
double x_spread(const FlockSpec& spec, const Scene& scene);

/// Moves every robot toward the leader's x with constraints re-selected each
/// step. Steps are accepted only with zero overlap and all markers in view.
StepTrace flock_iterate(const Scene& scene, const FlockSpec& spec, const StepParams& params = {});

struct Flock {
  Scene scene;
  FlockSpec spec;
};

/// Leader in front of `columns` x `rows` square robots (side 0.5, spacing 2).
/// Each column follows its front robot; the front row is staggered back
/// from the centre so every front robot can see its inner neighbour.
Flock flock_formation(int columns, int rows, double epsilon = 0.1);

}  // namespace flexlp
