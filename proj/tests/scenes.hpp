#pragma once

// Small hand-built systems shared by the unit tests and the acceptance run.

#include <numbers>

#include "flexlp/constraints.hpp"
#include "flexlp/lp.hpp"
#include "flexlp/structures.hpp"

namespace test {

/// One-link arm of length 2 pinned at the origin at 45 degrees, its tip in
/// the window bounded by walls on x = 1, x = 2, y = 1 and y = 2. Only the
/// arm's rotation is free.
struct ArmSystem {
  flexlp::Scene scene;
  flexlp::DistanceSystem system;
  flexlp::Bounds bounds;
};

inline ArmSystem arm_system() {
  using flexlp::structures::rectangle;
  ArmSystem a;
  a.scene.bodies = {
      {"left", rectangle(0, 0, 1, 3), {}, true},    // edge 1 lies on x = 1
      {"right", rectangle(2, 0, 3, 3), {}, true},   // edge 3 on x = 2
      {"bottom", rectangle(0, 0, 3, 1), {}, true},  // edge 2 on y = 1
      {"top", rectangle(0, 2, 3, 3), {}, true},     // edge 0 on y = 2
      {"arm", flexlp::Polygon({{0, -0.01}, {2, 0}, {0, 0.01}}), {0, 0, std::numbers::pi / 4}, false},
  };
  a.system = flexlp::assemble(a.scene, std::vector<flexlp::ConstraintPair>{
                                           {0, 1, 4, 1}, {1, 3, 4, 1}, {2, 2, 4, 1}, {3, 0, 4, 1}});
  a.bounds.lower = Eigen::Vector3d(0, 0, -1);
  a.bounds.upper = Eigen::Vector3d(0, 0, 1);
  return a;
}

/// Fixed unit square A at the origin and free unit square B whose lower-left
/// corner sits diagonally off A's upper-right corner at (1 + g, 1 + g).
inline flexlp::Scene corner_pair(double g) {
  using flexlp::structures::rectangle;
  flexlp::Scene s;
  s.bodies = {{"A", rectangle(0, 0, 1, 1), {}, true}, {"B", rectangle(0, 0, 1, 1), {1 + g, 1 + g, 0}, false}};
  s.epsilon = 4 * g;
  return s;
}

/// Pins every DOF to dq and asks whether the rows admit it.
inline bool lp_admits(const flexlp::DistanceSystem& system, const Eigen::VectorXd& dq) {
  flexlp::Objective c{Eigen::VectorXd::Ones(dq.size())};
  return flexlp::solve_flex(system, c, flexlp::Bounds{dq, dq}).status == flexlp::LpStatus::optimal;
}

/// Plain rows for the corner encounter: B's corner against both extended
/// edges of A that meet at A's corner.
inline flexlp::DistanceSystem plain_corner_rows(const flexlp::Scene& s) {
  return flexlp::assemble(s, std::vector<flexlp::ConstraintPair>{{0, 1, 1, 0}, {0, 2, 1, 0}});
}

}  // namespace test
