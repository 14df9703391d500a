#include "flexlp/analyses.hpp"

#include <cmath>
#include <string>

namespace flexlp {

namespace {

Vec2 world_centroid(const Body& body) {
  return body.pose.translation() + kernel::rotate(body.polygon.centroid(), body.pose.theta);
}

void require_body(const Scene& scene, std::size_t index, const char* role) {
  if (index >= scene.bodies.size())
    throw InputError(std::string(role) + " body index " + std::to_string(index) + " is out of range");
}

Scene inset_free_bodies(const Scene& scene, double t) {
  Scene out = scene;
  if (t == 0.0) return out;
  for (Body& b : out.bodies)
    if (!b.fixed) b.polygon = inset_polygon(b.polygon, t);
  return out;
}

Vec2 tracked_point(const Scene& scene, std::size_t body, const Vec2& local) {
  const Pose& p = scene.bodies[body].pose;
  return p.translation() + kernel::rotate(local, p.theta);
}

}  // namespace

Objective make_objective(const Scene& scene, const Goal& goal) {
  const std::vector<int> cols = column_blocks(scene);
  Objective obj;
  obj.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_count(scene)));

  if (const auto* g = std::get_if<DirectionGoal>(&goal)) {
    obj.source = ObjectiveSource::direction;
    if (g->bodies.empty()) {
      for (int c : cols)
        if (c >= 0) obj.weights.segment<2>(c) = g->direction;
    } else {
      for (std::size_t b : g->bodies) {
        require_body(scene, b, "objective");
        if (cols[b] < 0) throw InputError("objective body '" + scene.bodies[b].name + "' is fixed");
        obj.weights.segment<2>(cols[b]) = g->direction;
      }
    }
  } else if (const auto* r = std::get_if<RadialGoal>(&goal)) {
    obj.source = ObjectiveSource::radial;
    for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
      if (cols[i] < 0) continue;
      const Vec2 out = world_centroid(scene.bodies[i]) - r->center;
      const double len = out.norm();
      if (len > 1e-12) obj.weights.segment<2>(cols[i]) = out / len;
    }
  } else {
    const auto& l = std::get<LeaderXGoal>(goal);
    obj.source = ObjectiveSource::leader_x;
    require_body(scene, l.leader, "leader");
    const double xl = world_centroid(scene.bodies[l.leader]).x();
    for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
      if (cols[i] < 0 || i == l.leader) continue;
      const double dx = world_centroid(scene.bodies[i]).x() - xl;
      if (std::abs(dx) > 1e-12) obj.weights(cols[i]) = dx > 0.0 ? -1.0 : 1.0;
    }
  }
  validate_objective(obj, obj.weights.size());
  return obj;
}

Vec2 scene_centroid(const Scene& scene) {
  Vec2 sum = Vec2::Zero();
  double area = 0.0;
  for (const Body& b : scene.bodies) {
    const double a = b.polygon.area();
    sum += a * world_centroid(b);
    area += a;
  }
  if (!(area > 0.0)) throw InputError("scene has no area");
  return sum / area;
}

double tolerance_metric(const Scene& scene, const ToleranceQuery& query, double t) {
  require_body(scene, query.track_body, "tracked");
  const Scene inset = inset_free_bodies(scene, t);
  const StepTrace trace = flex_iterate(inset, make_objective(inset, query.goal), query.params);
  const Vec2 local = query.track_point.value_or(scene.bodies[query.track_body].polygon.centroid());
  return (tracked_point(trace.final_scene, query.track_body, local) - tracked_point(inset, query.track_body, local))
      .norm();
}

ToleranceResult tolerance_search(const Scene& scene, const ToleranceQuery& query) {
  require_body(scene, query.track_body, "tracked");
  if (!(query.t_max >= 0.0) || !std::isfinite(query.t_max)) throw InputError("t_max must be non-negative");
  if (!(query.threshold > 0.0)) throw InputError("threshold must be positive");
  if (!(query.bisection_tolerance > 0.0)) throw InputError("bisection tolerance must be positive");

  ToleranceResult result;
  const auto probe = [&](double t) {
    const double m = tolerance_metric(scene, query, t);
    for (const ToleranceProbe& p : result.probes) {
      if ((p.t < t && p.metric > m + 1e-9) || (p.t > t && p.metric + 1e-9 < m)) result.monotone = false;
    }
    result.probes.push_back({t, m});
    return m;
  };

  if (probe(0.0) > query.threshold) return result;
  if (query.t_max == 0.0 || probe(query.t_max) <= query.threshold) {
    result.t_star = query.t_max;
    return result;
  }
  double lo = 0.0;
  double hi = query.t_max;
  while (hi - lo > query.bisection_tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) <= query.threshold)
      lo = mid;
    else
      hi = mid;
  }
  result.t_star = lo;
  return result;
}

CrossBeam suggest_cross_beam(const Scene& initial, const Scene& flexed) {
  if (initial.bodies.size() != flexed.bodies.size()) throw InputError("scenes have different body counts");
  for (std::size_t i = 0; i < initial.bodies.size(); ++i)
    if (initial.bodies[i].polygon.size() != flexed.bodies[i].polygon.size())
      throw InputError("body '" + initial.bodies[i].name + "' differs between the scenes");

  const auto pairs = mutually_visible_pairs(initial);
  if (pairs.empty()) throw InputError("no mutually visible vertex pairs");

  CrossBeam best;
  bool first = true;
  for (const auto& [a, b] : pairs) {
    const double d0 = (world_vertex(initial.bodies[a.body], a.vertex) -
                       world_vertex(initial.bodies[b.body], b.vertex)).norm();
    const double d1 = (world_vertex(flexed.bodies[a.body], a.vertex) -
                       world_vertex(flexed.bodies[b.body], b.vertex)).norm();
    const double change = std::abs(d1 - d0);
    if (first || change > best.change) {
      best = {a, b, d0, d1, change};
      first = false;
    }
  }
  return best;
}

}  // namespace flexlp
