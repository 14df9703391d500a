#include "flexlp/flock.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <limits>
#include <set>
#include <string>
#include <tuple>

#include "flexlp/analyses.hpp"

namespace flexlp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Vec2 world_centroid(const Body& body) {
  return body.pose.translation() + kernel::rotate(body.polygon.centroid(), body.pose.theta);
}

// Inward normals of the left and right cone edges, local frame.
std::pair<Vec2, Vec2> cone_normals(const Camera& cam) {
  const Vec2 f = cam.forward.normalized();
  const Vec2 left = kernel::rotate(f, cam.half_angle);
  const Vec2 right = kernel::rotate(f, -cam.half_angle);
  return {Vec2(left.y(), -left.x()), Vec2(-right.y(), right.x())};
}

double relax(double d, double clearance) { return d > clearance ? d - clearance : std::min(d, 0.0); }

const Body& robot_body(const FlockSpec& spec, const Scene& scene, std::size_t robot) {
  return scene.bodies[spec.robots[robot].body];
}

}  // namespace

void validate_flock(const FlockSpec& spec, const Scene& scene) {
  const std::size_t n = spec.robots.size();
  if (n == 0) throw InputError("flock has no robots");
  if (spec.leader >= n) throw InputError("flock leader index is out of range");
  if (spec.neighbors < 1) throw InputError("flock neighbour count must be at least 1");
  if (!(spec.rotation_cap > 0.0)) throw InputError("flock rotation cap must be positive");
  if (!(spec.leader_box > 0.0)) throw InputError("flock leader box must be positive");
  if (!(spec.clearance >= 0.0)) throw InputError("flock clearance must be non-negative");

  std::vector<char> used(scene.bodies.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const RobotSpec& r = spec.robots[i];
    if (r.body >= scene.bodies.size()) throw InputError("flock robot " + std::to_string(i) + " has no body");
    const std::string& name = scene.bodies[r.body].name;
    if (used[r.body]) throw InputError("body '" + name + "' is listed as two robots");
    used[r.body] = 1;
    if (scene.bodies[r.body].fixed) throw InputError("robot '" + name + "' is fixed");
    if (!(r.camera.half_angle > 0.0) || r.camera.half_angle > std::numbers::pi / 2)
      throw InputError("robot '" + name + "' camera half-angle must be in (0, pi/2]");
    if (!(r.camera.forward.norm() > 0.0)) throw InputError("robot '" + name + "' camera forward axis is zero");
    if (i == spec.leader) {
      if (r.predecessor) throw InputError("flock leader '" + name + "' cannot have a predecessor");
    } else if (!r.predecessor || *r.predecessor >= n || *r.predecessor == i) {
      throw InputError("robot '" + name + "' needs a valid predecessor");
    }
  }
  // Every chain of predecessors must end at the leader.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t at = i;
    for (std::size_t steps = 0; at != spec.leader; ++steps) {
      if (steps > n) throw InputError("flock predecessors contain a cycle");
      at = *spec.robots[at].predecessor;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == spec.leader) continue;
    const auto [l, r] = cone_margins(spec, scene, i);
    if (l < -kPenetrationTolerance || r < -kPenetrationTolerance)
      throw InputError("marker of '" + robot_body(spec, scene, *spec.robots[i].predecessor).name +
                       "' starts outside the view of '" + robot_body(spec, scene, i).name + "'");
  }
}

std::pair<double, double> cone_margins(const FlockSpec& spec, const Scene& scene, std::size_t robot) {
  const RobotSpec& r = spec.robots[robot];
  const RobotSpec& p = spec.robots[*r.predecessor];
  const auto [nl, nr] = cone_normals(r.camera);
  const Pose& q1 = scene.bodies[r.body].pose;
  const Pose& q2 = scene.bodies[p.body].pose;
  return {half_plane_row(q1, r.camera.apex, nl, q2, p.marker).distance,
          half_plane_row(q1, r.camera.apex, nr, q2, p.marker).distance};
}

bool markers_in_cones(const FlockSpec& spec, const Scene& scene) {
  for (std::size_t i = 0; i < spec.robots.size(); ++i) {
    if (i == spec.leader) continue;
    const auto [l, r] = cone_margins(spec, scene, i);
    if (l < -kPenetrationTolerance || r < -kPenetrationTolerance) return false;
  }
  return true;
}

std::vector<std::size_t> nearest_robots(const FlockSpec& spec, const Scene& scene, std::size_t robot) {
  const Vec2 c = world_centroid(robot_body(spec, scene, robot));
  std::vector<std::pair<double, std::size_t>> by_distance;
  for (std::size_t j = 0; j < spec.robots.size(); ++j)
    if (j != robot) by_distance.emplace_back((world_centroid(robot_body(spec, scene, j)) - c).squaredNorm(), j);
  const auto k = std::min(by_distance.size(), static_cast<std::size_t>(spec.neighbors));
  std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k), by_distance.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(by_distance[i].second);
  return out;
}

std::vector<ConstraintPair> neighbour_pairs(const FlockSpec& spec, const Scene& scene) {
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
  std::vector<ConstraintPair> pairs;
  const auto add = [&](std::size_t vb, std::size_t eb) {
    const Body& v_body = scene.bodies[vb];
    const Body& e_body = scene.bodies[eb];
    for (std::size_t v = 0; v < v_body.polygon.size(); ++v) {
      std::size_t best = 0;
      double best_d = -std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < e_body.polygon.size(); ++e) {
        const double d = signed_distance(e_body, e, v_body, v);
        if (d > best_d) {
          best_d = d;
          best = e;
        }
      }
      if (seen.emplace(eb, best, vb, v).second) {
        ConstraintPair p;
        p.edge_body = eb;
        p.edge_index = best;
        p.vertex_body = vb;
        p.vertex_index = v;
        pairs.push_back(p);
      }
    }
  };
  for (std::size_t i = 0; i < spec.robots.size(); ++i) {
    for (std::size_t j : nearest_robots(spec, scene, i)) {
      add(spec.robots[i].body, spec.robots[j].body);
      add(spec.robots[j].body, spec.robots[i].body);
    }
  }
  return pairs;
}

AuxRows flock_aux_rows(const FlockSpec& spec, const Scene& scene, const Vec2& leader_center) {
  const std::vector<int> cols = column_blocks(scene);
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> offset;
  const auto next_row = [&] { return static_cast<Eigen::Index>(offset.size()); };

  for (std::size_t i = 0; i < spec.robots.size(); ++i) {
    if (i == spec.leader) continue;
    const RobotSpec& r = spec.robots[i];
    const RobotSpec& p = spec.robots[*r.predecessor];
    const auto [nl, nr] = cone_normals(r.camera);
    for (const Vec2& normal : {nl, nr}) {
      const RowGradient g =
          half_plane_row(scene.bodies[r.body].pose, r.camera.apex, normal, scene.bodies[p.body].pose, p.marker);
      append_row(triplets, next_row(), cols, r.body, p.body, g.partials);
      offset.push_back(relax(g.distance, spec.clearance));
    }
  }
  for (const RobotSpec& r : spec.robots) {
    const int c = cols[r.body];
    triplets.emplace_back(next_row(), c + 2, 1.0);
    offset.push_back(spec.rotation_cap);
    triplets.emplace_back(next_row(), c + 2, -1.0);
    offset.push_back(spec.rotation_cap);
  }
  const Body& leader = robot_body(spec, scene, spec.leader);
  const int c = cols[spec.robots[spec.leader].body];
  const Vec2 at = leader.pose.translation();
  for (int axis = 0; axis < 2; ++axis) {
    triplets.emplace_back(next_row(), c + axis, 1.0);
    offset.push_back(at(axis) - (leader_center(axis) - spec.leader_box));
    triplets.emplace_back(next_row(), c + axis, -1.0);
    offset.push_back(leader_center(axis) + spec.leader_box - at(axis));
  }

  AuxRows aux;
  aux.rows.resize(next_row(), static_cast<Eigen::Index>(dof_count(scene)));
  aux.rows.setFromTriplets(triplets.begin(), triplets.end());
  aux.offset = Eigen::Map<const Eigen::VectorXd>(offset.data(), next_row());
  return aux;
}

AuxRows flock_constraints(const FlockSpec& spec, const Scene& scene, const Vec2& leader_center) {
  const DistanceSystem sys = assemble(scene, neighbour_pairs(spec, scene));
  const AuxRows cones = flock_aux_rows(spec, scene, leader_center);

  AuxRows all;
  const Eigen::Index m1 = sys.rows();
  const Eigen::Index m2 = cones.rows.rows();
  all.offset.resize(m1 + m2);
  for (Eigen::Index i = 0; i < m1; ++i) all.offset(i) = relax(sys.d0(i), spec.clearance);
  all.offset.tail(m2) = cones.offset;

  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < m1; ++i)
    for (SparseRows::InnerIterator it(sys.jacobian, i); it; ++it) triplets.emplace_back(i, it.col(), it.value());
  for (Eigen::Index i = 0; i < m2; ++i)
    for (SparseRows::InnerIterator it(cones.rows, i); it; ++it)
      triplets.emplace_back(m1 + i, it.col(), it.value());
  all.rows.resize(m1 + m2, static_cast<Eigen::Index>(dof_count(scene)));
  all.rows.setFromTriplets(triplets.begin(), triplets.end());
  return all;
}

double x_spread(const FlockSpec& spec, const Scene& scene) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < spec.robots.size(); ++i) {
    const double x = world_centroid(robot_body(spec, scene, i)).x();
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

StepTrace flock_iterate(const Scene& scene, const FlockSpec& spec, const StepParams& params) {
  validate_scene(scene);
  validate_params(params);
  validate_flock(spec, scene);
  if (max_violation(scene) > 0.0) throw InputError("flock robots overlap initially");

  StepTrace trace;
  Scene current = scene;
  const Vec2 center = robot_body(spec, scene, spec.leader).pose.translation();
  const Bounds bounds = default_bounds(scene);
  const double tolerance = params.gain_tolerance * std::max(structure_diameter(scene), 1e-12);
  const auto acceptable = [&](const Scene& s) { return max_violation(s) <= 0.0 && markers_in_cones(spec, s); };
  const auto finish = [&](StepStatus status) {
    trace.status = status;
    trace.final_scene = current;
    return trace;
  };

  for (int iter = 0; iter < params.max_iters; ++iter) {
    Objective objective;
    try {
      objective = make_objective(current, LeaderXGoal{spec.robots[spec.leader].body});
    } catch (const InputError&) {
      return finish(StepStatus::converged);  // everyone already at the leader's x
    }

    auto t0 = Clock::now();
    const DistanceSystem empty = assemble(current, std::vector<ConstraintPair>{});
    const AuxRows rows = flock_constraints(spec, current, center);
    trace.seconds.assemble += seconds_since(t0);
    if (iter == 0) {
      trace.jacobian_rows = rows.rows.rows();
      trace.jacobian_cols = rows.rows.cols();
    }

    Bounds trust = bounds;
    LpResult lp;
    double scale = 0.0;
    for (int shrink = 0; shrink <= params.max_bound_shrinks; ++shrink) {
      t0 = Clock::now();
      lp = solve_flex(empty, objective, trust, &rows);
      trace.seconds.solve += seconds_since(t0);
      if (lp.status == LpStatus::unbounded) return finish(StepStatus::lp_unbounded);
      if (lp.status == LpStatus::infeasible) return finish(StepStatus::lp_infeasible);
      t0 = Clock::now();
      scale = line_search(current, lp.displacement, params, acceptable, &trust);
      trace.seconds.line_search += seconds_since(t0);
      if (scale > 0.0) break;
      trust = scale_bounds(trust, 0.5);
    }
    if (scale == 0.0) return finish(StepStatus::stalled);

    current = apply_displacement(current, lp.displacement, scale);
    StepRecord rec;
    rec.lp_objective = lp.objective;
    rec.scale = scale;
    rec.gain = scale * lp.objective;
    rec.violation = max_violation(current);
    rec.poses = poses_of(current);
    trace.iterations.push_back(std::move(rec));
    if (std::abs(trace.iterations.back().gain) < tolerance) return finish(StepStatus::converged);
  }
  return finish(StepStatus::max_iters);
}

Flock flock_formation(int columns, int rows, double epsilon) {
  if (columns < 1 || rows < 1) throw InputError("flock formation needs at least one row and column");
  constexpr double kSide = 0.5;
  constexpr double kSpacing = 2.0;
  constexpr double kStagger = 1.2;
  const double h = 0.5 * kSide;
  const Polygon square({{-h, -h}, {h, -h}, {h, h}, {-h, h}});
  const Camera camera{{0.0, h}, {0.0, 1.0}, 80.0 * std::numbers::pi / 180.0};
  const Vec2 marker(0.0, -h);

  Flock f;
  f.scene.epsilon = epsilon;
  f.scene.bodies.push_back({"leader", square, {0.0, kSpacing, 0.0}, false});
  f.spec.robots.push_back({0, std::nullopt, camera, marker});
  f.spec.leader = 0;

  const int half = columns / 2;
  // robot index of (column offset, row), filled front row first
  std::vector<std::vector<std::size_t>> index(static_cast<std::size_t>(columns));
  std::vector<int> order(static_cast<std::size_t>(columns));
  for (int c = 0; c < columns; ++c) order[static_cast<std::size_t>(c)] = c;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(a - half) < std::abs(b - half); });
  for (int row = 0; row < rows; ++row) {
    for (int c : order) {
      const int offset = c - half;
      const double x = kSpacing * offset;
      const double y = 0.0 - (kStagger * std::abs(offset) + kSpacing * row);
      const std::size_t body = f.scene.bodies.size();
      f.scene.bodies.push_back(
          {"r" + std::to_string(row) + "_" + std::to_string(c), square, {x, y, 0.0}, false});
      std::size_t pred = 0;
      if (row > 0) {
        pred = index[static_cast<std::size_t>(c)].back();
      } else if (offset != 0) {
        pred = index[static_cast<std::size_t>(offset > 0 ? c - 1 : c + 1)].front();
      }
      index[static_cast<std::size_t>(c)].push_back(f.spec.robots.size());
      f.spec.robots.push_back({body, pred, camera, marker});
    }
  }
  return f;
}

}  // namespace flexlp
