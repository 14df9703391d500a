#include "flexlp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace flexlp {

namespace {

constexpr double kLengthTolerance = 1e-10;

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect_closed(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

std::string format_point(const Vec2& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

}  // namespace

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw GeometryError("polygon needs at least three vertices");
  for (const Vec2& v : vertices_) {
    if (!v.allFinite()) throw GeometryError("polygon vertex " + format_point(v) + " is not finite");
  }
  if (!is_simple_loop(vertices_)) throw GeometryError("polygon is self-intersecting");
  const double area = signed_area(vertices_);
  if (!(std::abs(area) > 0.0)) throw GeometryError("polygon has zero area");
  if (area < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());
    reversed_ = true;
  }

  const std::size_t n = vertices_.size();
  edges_.resize(n);
  polar_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& v = vertices_[i];
    polar_[i].r = v.norm();
    polar_[i].alpha = polar_[i].r > 0.0 ? std::atan2(v.y(), v.x()) : 0.0;

    Edge& e = edges_[i];
    e.e0 = i;
    e.e1 = (i + 1) % n;
    e.length = (vertices_[e.e1] - vertices_[e.e0]).norm();
    if (!(e.length > 0.0))
      throw GeometryError("polygon has a zero-length edge at vertex " + format_point(v));
    e.inv_length = 1.0 / e.length;
  }
}

const Vec2& Polygon::vertex(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("vertex index out of range");
  return vertices_[i];
}

const PolarPoint& Polygon::polar(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("vertex index out of range");
  return polar_[i];
}

const Edge& Polygon::edge(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("edge index out of range");
  return edges_[i];
}

Vec2 Polygon::local_normal(std::size_t edge_index) const {
  const Edge& e = edge(edge_index);
  const Vec2 d = (vertices_[e.e1] - vertices_[e.e0]) * e.inv_length;
  return {d.y(), -d.x()};
}

double Polygon::area() const { return signed_area(vertices_); }

double Polygon::perimeter() const {
  double p = 0.0;
  for (const Edge& e : edges_) p += e.length;
  return p;
}

Vec2 Polygon::centroid() const {
  Vec2 c = Vec2::Zero();
  double a2 = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % n];
    const double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  return c / (3.0 * a2);
}

std::vector<int> column_blocks(const Scene& scene) {
  std::vector<int> cols(scene.bodies.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
    if (!scene.bodies[i].fixed) {
      cols[i] = next;
      next += 3;
    }
  }
  return cols;
}

std::size_t free_body_count(const Scene& scene) {
  return static_cast<std::size_t>(std::count_if(scene.bodies.begin(), scene.bodies.end(),
                                                [](const Body& b) { return !b.fixed; }));
}

void validate_scene(const Scene& scene) {
  if (scene.bodies.empty()) throw InputError("scene has no bodies");
  if (!(scene.epsilon > 0.0) || !std::isfinite(scene.epsilon))
    throw InputError("scene epsilon must be positive and finite");
  for (const Body& b : scene.bodies) {
    if (!b.pose.vector().allFinite()) throw GeometryError("body '" + b.name + "' has a non-finite pose");
  }
  if (scene.bounds) {
    if (!(scene.bounds->translation > 0.0) || !(scene.bounds->rotation > 0.0))
      throw InputError("scene bounds must be positive");
  }
}

Vec2 world_vertex(const Body& body, std::size_t vertex_index) {
  return kernel::world_point<double>(body.pose.vector(), body.polygon.polar(vertex_index));
}

std::vector<Vec2> world_vertices(const Body& body) {
  std::vector<Vec2> out;
  out.reserve(body.polygon.size());
  const Vec3 q = body.pose.vector();
  for (std::size_t i = 0; i < body.polygon.size(); ++i)
    out.push_back(kernel::world_point<double>(q, body.polygon.polar(i)));
  return out;
}

Vec2 edge_normal(const Body& body, std::size_t edge_index) {
  const Edge& e = body.polygon.edge(edge_index);
  return kernel::edge_normal<double>(body.pose.vector(), body.polygon.polar(e.e0),
                                     body.polygon.polar(e.e1), e.inv_length);
}

double signed_distance(const Body& edge_body, std::size_t edge_index, const Body& vertex_body,
                       std::size_t vertex_index) {
  const Edge& e = edge_body.polygon.edge(edge_index);
  return kernel::edge_vertex_distance<double>(
      edge_body.pose.vector(), edge_body.polygon.polar(e.e0), edge_body.polygon.polar(e.e1),
      e.inv_length, vertex_body.pose.vector(), vertex_body.polygon.polar(vertex_index));
}

Box2 world_bounds(const Body& body) {
  Box2 box;
  for (const Vec2& v : world_vertices(body)) box.extend(v);
  return box;
}

double structure_diameter(const Scene& scene) {
  Box2 box;
  for (const Body& b : scene.bodies) box.extend(world_bounds(b));
  return box.isEmpty() ? 0.0 : box.diagonal().norm();
}

CornerKind classify_corner(const Polygon& polygon, std::size_t vertex_index) {
  const Vec2& v = polygon.vertex(vertex_index);
  const Vec2 d_in = (v - polygon.vertex(polygon.prev(vertex_index))).normalized();
  const Vec2 d_out = (polygon.vertex(polygon.next(vertex_index)) - v).normalized();
  const double c = cross(d_in, d_out);
  if (c > kFlatCornerTolerance) return CornerKind::convex;
  if (c < -kFlatCornerTolerance) return CornerKind::concave;
  return CornerKind::flat;
}

Polygon inset_polygon(const Polygon& polygon, double depth) {
  if (!(depth >= 0.0) || !std::isfinite(depth)) throw GeometryError("inset depth must be non-negative");
  if (depth == 0.0) return polygon;

  const std::size_t n = polygon.size();
  std::vector<Vec2> base(n), dir(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Edge& e = polygon.edge(i);
    base[i] = polygon.vertex(e.e0) - depth * polygon.local_normal(i);
    dir[i] = polygon.vertex(e.e1) - polygon.vertex(e.e0);
  }

  std::vector<Vec2> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = polygon.prev(j);
    const double denom = cross(dir[i], dir[j]);
    if (std::abs(denom) <= kFlatCornerTolerance * dir[i].norm() * dir[j].norm()) {
      // Collinear neighbours: both offset lines coincide.
      out[j] = polygon.vertex(j) - depth * polygon.local_normal(j);
    } else {
      const double s = cross(base[j] - base[i], dir[j]) / denom;
      out[j] = base[i] + s * dir[i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = out[(i + 1) % n] - out[i];
    if (!(d.dot(dir[i]) > 0.0))
      throw GeometryError("inset by " + std::to_string(depth) + " collapses edge " + std::to_string(i));
  }
  if (!(signed_area(out) > 0.0) || !is_simple_loop(out))
    throw GeometryError("inset by " + std::to_string(depth) + " changes polygon topology");
  return Polygon(std::move(out));
}

double signed_area(const std::vector<Vec2>& loop) {
  double a2 = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) a2 += cross(loop[i], loop[(i + 1) % n]);
  return 0.5 * a2;
}

bool point_in_loop(const std::vector<Vec2>& loop, const Vec2& p) {
  bool inside = false;
  const std::size_t n = loop.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).norm();
}

double distance_to_loop(const std::vector<Vec2>& loop, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, loop[i], loop[(i + 1) % n]));
  return best;
}

bool segments_cross_properly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double lab = (b - a).norm();
  const double lcd = (d - c).norm();
  if (lab == 0.0 || lcd == 0.0) return false;
  const double o1 = orient(a, b, c) / lab;
  const double o2 = orient(a, b, d) / lab;
  const double o3 = orient(c, d, a) / lcd;
  const double o4 = orient(c, d, b) / lcd;
  const auto opposite = [](double u, double v) {
    return (u > kLengthTolerance && v < -kLengthTolerance) || (u < -kLengthTolerance && v > kLengthTolerance);
  };
  return opposite(o1, o2) && opposite(o3, o4);
}

bool is_simple_loop(const std::vector<Vec2>& loop) {
  const std::size_t n = loop.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % n];
    // Adjacent edge folding back onto this one.
    const Vec2& c = loop[(i + 2) % n];
    if (orient(a, b, c) == 0.0 && (b - a).dot(c - b) < 0.0) return false;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect_closed(a, b, loop[j], loop[(j + 1) % n])) return false;
    }
  }
  return true;
}

Overlap overlap_depth(const Scene& scene, std::size_t a, std::size_t b) {
  Overlap out;
  out.outer_body = a;
  out.inner_body = b;
  const Body& ba = scene.bodies[a];
  const Body& bb = scene.bodies[b];
  Box2 box_a = world_bounds(ba);
  Box2 box_b = world_bounds(bb);
  box_a.extend(box_a.min() - Vec2::Constant(kLengthTolerance));
  box_a.extend(box_a.max() + Vec2::Constant(kLengthTolerance));
  if (!box_a.intersects(box_b)) return out;

  const std::vector<Vec2> wa = world_vertices(ba);
  const std::vector<Vec2> wb = world_vertices(bb);
  const auto probe = [&](const std::vector<Vec2>& outer, const std::vector<Vec2>& inner,
                         std::size_t outer_index, std::size_t inner_index) {
    for (std::size_t v = 0; v < inner.size(); ++v) {
      if (!point_in_loop(outer, inner[v])) continue;
      const double d = distance_to_loop(outer, inner[v]);
      if (d > out.depth) {
        out.depth = d;
        out.outer_body = outer_index;
        out.inner_body = inner_index;
        out.inner_vertex = v;
      }
    }
  };
  probe(wa, wb, a, b);
  probe(wb, wa, b, a);
  if (out.depth > kLengthTolerance) return out;

  for (std::size_t i = 0; i < wa.size(); ++i) {
    for (std::size_t j = 0; j < wb.size(); ++j) {
      if (segments_cross_properly(wa[i], wa[(i + 1) % wa.size()], wb[j], wb[(j + 1) % wb.size()])) {
        out.depth = std::numeric_limits<double>::infinity();
        out.inner_vertex = i;
        return out;
      }
    }
  }

  // No vertex inside and no proper crossing, but boundary pieces can still
  // run through the other interior when edges are collinear (aligned boxes
  // sliding into each other).
  const auto edges_inside = [&](const std::vector<Vec2>& outer, const std::vector<Vec2>& inner,
                                std::size_t outer_index, std::size_t inner_index) {
    for (std::size_t e = 0; e < inner.size(); ++e) {
      const double d = segment_interior_depth(outer, inner[e], inner[(e + 1) % inner.size()]);
      if (d > out.depth) {
        out.depth = d;
        out.outer_body = outer_index;
        out.inner_body = inner_index;
        out.inner_vertex = e;
      }
    }
  };
  edges_inside(wa, wb, a, b);
  edges_inside(wb, wa, b, a);
  if (out.depth > kLengthTolerance) return out;

  // Coincident regions: every vertex and edge midpoint of each loop lies on
  // the other's boundary.
  const auto on_boundary = [](const std::vector<Vec2>& outer, const std::vector<Vec2>& inner) {
    for (std::size_t e = 0; e < inner.size(); ++e) {
      const Vec2 mid = 0.5 * (inner[e] + inner[(e + 1) % inner.size()]);
      if (distance_to_loop(outer, inner[e]) > kLengthTolerance || distance_to_loop(outer, mid) > kLengthTolerance)
        return false;
    }
    return true;
  };
  if (on_boundary(wa, wb) && on_boundary(wb, wa)) out.depth = std::numeric_limits<double>::infinity();
  return out;
}

Overlap max_overlap(const Scene& scene) {
  Overlap worst;
  const std::size_t n = scene.bodies.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (scene.bodies[a].fixed && scene.bodies[b].fixed) continue;
      const Overlap o = overlap_depth(scene, a, b);
      if (o.depth > worst.depth) worst = o;
    }
  }
  return worst;
}

double segment_interior_depth(const std::vector<Vec2>& loop, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return 0.0;
  std::vector<double> cuts{0.0, 1.0};
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& c = loop[i];
    const Vec2& d = loop[(i + 1) % n];
    const Vec2 cd = d - c;
    const double denom = cross(ab, cd);
    if (std::abs(denom) > 1e-14 * std::sqrt(len2) * cd.norm()) {
      const double s = cross(c - a, cd) / denom;
      const double u = cross(c - a, ab) / denom;
      if (s > 0.0 && s < 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) cuts.push_back(s);
    } else if (std::abs(cross(c - a, ab)) <= 1e-12 * std::sqrt(len2)) {
      for (const Vec2& p : {c, d}) {
        const double s = (p - a).dot(ab) / len2;
        if (s > 0.0 && s < 1.0) cuts.push_back(s);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double depth = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] < 1e-12) continue;
    const Vec2 mid = a + 0.5 * (cuts[i] + cuts[i + 1]) * ab;
    if (point_in_loop(loop, mid)) depth = std::max(depth, distance_to_loop(loop, mid));
  }
  return depth;
}

bool segment_hits_interior(const std::vector<Vec2>& loop, const Vec2& a, const Vec2& b) {
  return segment_interior_depth(loop, a, b) > 1e-9;
}

std::vector<std::pair<VertexRef, VertexRef>> mutually_visible_pairs(const Scene& scene) {
  const std::size_t nb = scene.bodies.size();
  std::vector<std::vector<Vec2>> loops(nb);
  std::vector<Box2> boxes(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    loops[i] = world_vertices(scene.bodies[i]);
    boxes[i] = world_bounds(scene.bodies[i]);
  }

  std::vector<std::pair<VertexRef, VertexRef>> out;
  for (std::size_t bi = 0; bi < nb; ++bi) {
    for (std::size_t bj = bi + 1; bj < nb; ++bj) {
      for (std::size_t vi = 0; vi < loops[bi].size(); ++vi) {
        for (std::size_t vj = 0; vj < loops[bj].size(); ++vj) {
          const Vec2& a = loops[bi][vi];
          const Vec2& b = loops[bj][vj];
          if ((a - b).norm() <= kLengthTolerance) continue;
          Box2 seg(a.cwiseMin(b), a.cwiseMax(b));
          bool blocked = false;
          for (std::size_t k = 0; k < nb && !blocked; ++k) {
            if (!boxes[k].intersects(seg)) continue;
            blocked = segment_hits_interior(loops[k], a, b);
          }
          if (!blocked) out.push_back({{bi, vi}, {bj, vj}});
        }
      }
    }
  }
  return out;
}

}  // namespace flexlp
