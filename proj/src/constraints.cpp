#include "flexlp/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace flexlp {

namespace {

constexpr double kSpanTolerance = 1e-9;

struct EdgeProjection {
  double distance = 0.0;
  double projection = 0.0;
  double length = 0.0;

  bool within_span() const {
    return projection >= -kSpanTolerance && projection <= length + kSpanTolerance;
  }
};

EdgeProjection project(const Body& edge_body, std::size_t edge_index, const Vec2& point) {
  const Edge& e = edge_body.polygon.edge(edge_index);
  const Vec2 o = world_vertex(edge_body, e.e0);
  const Vec2 dir = (world_vertex(edge_body, e.e1) - o) * e.inv_length;
  return {edge_normal(edge_body, edge_index).dot(point - o), (point - o).dot(dir), e.length};
}

ConstraintPair plain(std::size_t edge_body, std::size_t edge_index, std::size_t vertex_body,
                     std::size_t vertex_index) {
  ConstraintPair p;
  p.edge_body = edge_body;
  p.edge_index = edge_index;
  p.vertex_body = vertex_body;
  p.vertex_index = vertex_index;
  return p;
}

auto sort_key(const ConstraintPair& p) {
  const std::size_t feature = p.kind == PairKind::plain ? p.edge_index : p.corner;
  return std::make_tuple(std::min(p.edge_body, p.vertex_body), std::max(p.edge_body, p.vertex_body),
                         p.edge_body, static_cast<int>(p.kind), feature, p.vertex_index);
}

}  // namespace

std::vector<ProximityCandidate> proximity_candidates(const Scene& scene,
                                                     const SelectionOptions& options) {
  validate_scene(scene);
  const std::size_t nb = scene.bodies.size();
  const double eps = scene.epsilon;
  const double tol = options.penetration_tolerance;

  std::vector<std::vector<Vec2>> world(nb);
  std::vector<Box2> boxes(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    world[i] = world_vertices(scene.bodies[i]);
    boxes[i] = world_bounds(scene.bodies[i]);
    boxes[i].extend(boxes[i].min() - Vec2::Constant(eps));
    boxes[i].extend(boxes[i].max() + Vec2::Constant(eps));
  }

  std::vector<ProximityCandidate> out;
  const auto gather = [&](std::size_t eb, std::size_t vb) {
    const Body& edge_body = scene.bodies[eb];
    for (std::size_t e = 0; e < edge_body.polygon.size(); ++e) {
      for (std::size_t v = 0; v < world[vb].size(); ++v) {
        const EdgeProjection pr = project(edge_body, e, world[vb][v]);
        if (pr.distance < -tol || pr.distance > eps) continue;
        if (pr.projection < -eps || pr.projection > pr.length + eps) continue;
        out.push_back({eb, e, vb, v, signed_distance(edge_body, e, scene.bodies[vb], v), pr.projection});
      }
    }
  };

  for (std::size_t a = 0; a < nb; ++a) {
    for (std::size_t b = a + 1; b < nb; ++b) {
      if (scene.bodies[a].fixed && scene.bodies[b].fixed) continue;
      if (!boxes[a].intersects(boxes[b])) continue;
      const Overlap ov = overlap_depth(scene, a, b);
      if (ov.depth > tol) {
        std::ostringstream os;
        os << "initial penetration: vertex " << ov.inner_vertex << " of body '"
           << scene.bodies[ov.inner_body].name << "' lies " << ov.depth << " inside body '"
           << scene.bodies[ov.outer_body].name << "'";
        throw PenetrationError(os.str(), ov.outer_body, ov.inner_body, ov.inner_vertex, ov.depth);
      }
      gather(a, b);
      gather(b, a);
    }
  }
  return out;
}

std::vector<ConstraintPair> orient_pair(const Scene& scene, const ProximityCandidate& c,
                                        const SelectionOptions& options) {
  const Body& eb = scene.bodies[c.edge_body];
  const Body& vb = scene.bodies[c.vertex_body];
  const Edge& edge = eb.polygon.edge(c.edge_index);
  const double tol = options.penetration_tolerance;

  if (c.projection >= -kSpanTolerance && c.projection <= edge.length + kSpanTolerance)
    return {plain(c.edge_body, c.edge_index, c.vertex_body, c.vertex_index)};

  // Past one endpoint: the encounter is with the corner at that endpoint.
  const bool before = c.projection < 0.0;
  const std::size_t corner = before ? edge.e0 : edge.e1;
  const std::size_t other_edge = before ? eb.polygon.prev(corner) : corner;
  const Vec2 p = world_vertex(vb, c.vertex_index);

  const EdgeProjection facing = project(eb, other_edge, p);
  if (facing.within_span() && facing.distance >= -tol)
    return {plain(c.edge_body, other_edge, c.vertex_body, c.vertex_index)};

  if (classify_corner(eb.polygon, corner) != CornerKind::convex)
    return {plain(c.edge_body, c.edge_index, c.vertex_body, c.vertex_index)};

  const CornerKind vertex_kind = classify_corner(vb.polygon, c.vertex_index);
  if (vertex_kind == CornerKind::convex) {
    ConstraintPair pair;
    pair.edge_body = c.edge_body;
    pair.edge_index = c.edge_index;
    pair.vertex_body = c.vertex_body;
    pair.vertex_index = c.vertex_index;
    pair.kind = PairKind::averaged_normal;
    pair.corner = corner;
    pair.corner_edges = {eb.polygon.prev(corner), corner};
    return {pair};
  }

  // Convex corner against a concave or flat vertex: the vertex's body
  // supplies the edges and the corner becomes the vertex.
  const Vec2 w = world_vertex(eb, corner);
  std::vector<ConstraintPair> out;
  std::vector<ConstraintPair> outside;
  for (std::size_t f : {vb.polygon.prev(c.vertex_index), c.vertex_index}) {
    const EdgeProjection pr = project(vb, f, w);
    if (pr.distance < -tol) continue;
    outside.push_back(plain(c.vertex_body, f, c.edge_body, corner));
    if (vertex_kind == CornerKind::concave || pr.within_span()) out.push_back(outside.back());
  }
  if (out.empty() && !outside.empty()) out.push_back(outside.front());
  return out;
}

std::vector<ConstraintPair> select_pairs(const Scene& scene, const SelectionOptions& options) {
  std::vector<ConstraintPair> pairs;
  for (const ProximityCandidate& c : proximity_candidates(scene, options)) {
    for (ConstraintPair& p : orient_pair(scene, c, options)) pairs.push_back(p);
  }

  std::sort(pairs.begin(), pairs.end(),
            [](const ConstraintPair& a, const ConstraintPair& b) { return sort_key(a) < sort_key(b); });
  pairs.erase(std::unique(pairs.begin(), pairs.end(),
                          [](const ConstraintPair& a, const ConstraintPair& b) {
                            return sort_key(a) == sort_key(b);
                          }),
              pairs.end());

  // A mutual convex-convex encounter is kept once, with the lower body
  // index supplying the corner.
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> averaged;
  for (const ConstraintPair& p : pairs) {
    if (p.kind == PairKind::averaged_normal)
      averaged.insert({p.edge_body, p.corner, p.vertex_body, p.vertex_index});
  }
  std::erase_if(pairs, [&](const ConstraintPair& p) {
    return p.kind == PairKind::averaged_normal && p.edge_body > p.vertex_body &&
           averaged.count({p.vertex_body, p.vertex_index, p.edge_body, p.corner}) > 0;
  });
  return pairs;
}

RowGradient half_plane_row(const Pose& pose1, const Vec2& anchor_local, const Vec2& normal_local,
                           const Pose& pose2, const Vec2& point_local) {
  const Vec2 c1 = pose1.translation();
  const Vec2 c2 = pose2.translation();
  const Vec2 n = kernel::rotate(normal_local, pose1.theta);
  const Vec2 o = c1 + kernel::rotate(anchor_local, pose1.theta);
  const Vec2 p = c2 + kernel::rotate(point_local, pose2.theta);

  RowGradient g;
  g.distance = n.dot(p - o);
  g.partials << -n.x(), -n.y(), perp(n).dot(p - c1), n.x(), n.y(), n.dot(perp(p - c2));
  return g;
}

RowGradient gradient_row(const Scene& scene, const ConstraintPair& pair) {
  if (pair.kind == PairKind::averaged_normal) return averaged_normal_row(scene, pair);
  const Body& eb = scene.bodies.at(pair.edge_body);
  const Body& vb = scene.bodies.at(pair.vertex_body);
  const Edge& e = eb.polygon.edge(pair.edge_index);
  RowGradient g = half_plane_row(eb.pose, eb.polygon.vertex(e.e0), eb.polygon.local_normal(pair.edge_index),
                                 vb.pose, vb.polygon.vertex(pair.vertex_index));
  g.distance = signed_distance(eb, pair.edge_index, vb, pair.vertex_index);
  return g;
}

RowGradient averaged_normal_row(const Scene& scene, const ConstraintPair& pair) {
  if (pair.kind != PairKind::averaged_normal)
    throw std::invalid_argument("averaged_normal_row needs an averaged_normal pair");
  const Body& eb = scene.bodies.at(pair.edge_body);
  const Body& vb = scene.bodies.at(pair.vertex_body);
  const Vec2 sum = eb.polygon.local_normal(pair.corner_edges[0]) + eb.polygon.local_normal(pair.corner_edges[1]);
  if (sum.norm() < 1e-9) {
    throw GeometryError("corner " + std::to_string(pair.corner) + " of body '" + eb.name +
                        "' has antiparallel edge normals");
  }
  return half_plane_row(eb.pose, eb.polygon.vertex(pair.corner), sum.normalized(), vb.pose,
                        vb.polygon.vertex(pair.vertex_index));
}

void append_row(std::vector<Eigen::Triplet<double>>& triplets, Eigen::Index row,
                const std::vector<int>& columns, std::size_t body1, std::size_t body2,
                const Row6& partials) {
  if (const int c = columns[body1]; c >= 0) {
    for (int k = 0; k < 3; ++k) triplets.emplace_back(row, c + k, partials(k));
  }
  if (const int c = columns[body2]; c >= 0) {
    for (int k = 0; k < 3; ++k) triplets.emplace_back(row, c + k, partials(3 + k));
  }
}

namespace {

DistanceSystem build_system(const Scene& scene, std::vector<ConstraintPair> pairs, double clamp_tolerance) {
  DistanceSystem sys;
  sys.pairs = std::move(pairs);
  sys.columns = column_blocks(scene);

  const auto m = static_cast<Eigen::Index>(sys.pairs.size());
  const auto n = static_cast<Eigen::Index>(dof_count(scene));
  sys.d0.resize(m);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(6 * m));
  for (Eigen::Index r = 0; r < m; ++r) {
    const ConstraintPair& pair = sys.pairs[static_cast<std::size_t>(r)];
    const RowGradient g = gradient_row(scene, pair);
    sys.d0(r) = (g.distance < 0.0 && g.distance >= -clamp_tolerance) ? 0.0 : g.distance;
    append_row(triplets, r, sys.columns, pair.edge_body, pair.vertex_body, g.partials);
  }
  sys.jacobian.resize(m, n);
  sys.jacobian.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

}  // namespace

DistanceSystem assemble(const Scene& scene, const SelectionOptions& options) {
  return build_system(scene, select_pairs(scene, options), options.penetration_tolerance);
}

DistanceSystem assemble(const Scene& scene, std::vector<ConstraintPair> pairs) {
  for (const ConstraintPair& p : pairs) {
    if (p.edge_body >= scene.bodies.size() || p.vertex_body >= scene.bodies.size())
      throw InputError("constraint pair refers to a missing body");
    if (p.edge_index >= scene.bodies[p.edge_body].polygon.size() ||
        p.vertex_index >= scene.bodies[p.vertex_body].polygon.size())
      throw InputError("constraint pair refers to a missing edge or vertex");
  }
  return build_system(scene, std::move(pairs), 0.0);
}

}  // namespace flexlp
