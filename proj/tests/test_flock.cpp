#include "doctest.h"

#include <cmath>
#include <numbers>

#include "flexlp/error.hpp"
#include "flexlp/flock.hpp"
#include "flexlp/structures.hpp"

using namespace flexlp;
using flexlp::structures::rectangle;

namespace {

/// Leader straight ahead of a follower whose camera looks along +y.
Flock pair_flock(double half_angle, Vec2 leader_at = {0.0, 2.0}) {
  Flock f;
  f.scene.bodies = {Body{"leader", rectangle(-0.25, -0.25, 0.25, 0.25), Pose{leader_at.x(), leader_at.y(), 0}, false},
                    Body{"follower", rectangle(-0.25, -0.25, 0.25, 0.25), Pose{}, false}};
  Camera cam{{0.0, 0.0}, {0.0, 1.0}, half_angle};
  f.spec.robots = {RobotSpec{0, std::nullopt, cam, {0.0, 0.0}}, RobotSpec{1, 0, cam, {0.0, 0.0}}};
  f.spec.clearance = 0.0;
  return f;
}

}  // namespace

TEST_CASE("marker on a cone boundary ray gives a zero row offset") {
  const double phi = std::numbers::pi / 6;
  const Flock f = pair_flock(phi, {2.0 * std::tan(phi), 2.0});
  const auto [left, right] = cone_margins(f.spec, f.scene, 1);
  CHECK(std::min(std::abs(left), std::abs(right)) <= 1e-15);
  CHECK(std::max(left, right) > 0.0);
  CHECK(markers_in_cones(f.spec, f.scene));
  const AuxRows aux = flock_aux_rows(f.spec, f.scene, f.scene.bodies[0].pose.translation());
  CHECK(std::abs(aux.offset.head(2).minCoeff()) <= 1e-15);
}

TEST_CASE("lateral travel of a follower matches the cone-exit distance") {
  for (double phi : {0.2, std::numbers::pi / 6, 1.2}) {
    const Flock f = pair_flock(phi);
    const AuxRows aux = flock_aux_rows(f.spec, f.scene, f.scene.bodies[0].pose.translation());
    const DistanceSystem none = assemble(f.scene, std::vector<ConstraintPair>{});
    Bounds b{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6)};
    b.lower(3) = -10.0;  // follower x only
    b.upper(3) = 10.0;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
    for (double sign : {1.0, -1.0}) {
      c(3) = sign;
      const LpResult r = solve_flex(none, Objective{c}, b, &aux);
      REQUIRE(r.status == LpStatus::optimal);
      CHECK(sign * r.displacement(3) == doctest::Approx(2.0 * std::tan(phi)).epsilon(1e-9));
    }
  }
}

TEST_CASE("formation is valid and the origin satisfies every flock row") {
  const Flock f = flock_formation(4, 3);
  CHECK(f.spec.robots.size() == 13);
  CHECK_NOTHROW(validate_flock(f.spec, f.scene));
  CHECK(markers_in_cones(f.spec, f.scene));
  const AuxRows rows = flock_constraints(f.spec, f.scene, f.scene.bodies[f.spec.robots[f.spec.leader].body].pose.translation());
  CHECK(rows.offset.minCoeff() >= 0.0);
  CHECK(rows.rows.cols() == Eigen::Index(dof_count(f.scene)));

  const std::vector<std::size_t> near = nearest_robots(f.spec, f.scene, 1);
  CHECK(near.size() == std::size_t(f.spec.neighbors));
  CHECK(std::find(near.begin(), near.end(), 1u) == near.end());
}

TEST_CASE("flock steps stay collision free and in view") {
  const Flock f = flock_formation(4, 2);
  StepParams p;
  p.max_iters = 8;
  const StepTrace t = flock_iterate(f.scene, f.spec, p);
  REQUIRE_FALSE(t.iterations.empty());
  for (const StepRecord& r : t.iterations) {
    const Scene s = with_poses(f.scene, r.poses);
    CHECK(max_violation(s) == 0.0);
    CHECK(markers_in_cones(f.spec, s));
  }
  CHECK(x_spread(f.spec, t.final_scene) < x_spread(f.spec, f.scene));
}

TEST_CASE("invalid flock specs") {
  Flock f = pair_flock(0.5);
  CHECK_NOTHROW(validate_flock(f.spec, f.scene));

  Flock outside = pair_flock(0.5, {3.0, 2.0});
  CHECK_THROWS_AS(validate_flock(outside.spec, outside.scene), InputError);

  Flock cycle = f;
  cycle.spec.robots[0].predecessor = 1;
  CHECK_THROWS_AS(validate_flock(cycle.spec, cycle.scene), InputError);

  Flock wide = f;
  wide.spec.robots[1].camera.half_angle = 2.0;
  CHECK_THROWS_AS(validate_flock(wide.spec, wide.scene), InputError);

  Flock fixed = f;
  fixed.scene.bodies[1].fixed = true;
  CHECK_THROWS_AS(validate_flock(fixed.spec, fixed.scene), InputError);
}
