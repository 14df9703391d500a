#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexlp/error.hpp"

namespace flexlp {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec2 = Vector2<double>;
using Vec3 = Vector3<double>;
using Box2 = Eigen::AlignedBox2d;

inline constexpr double kFlatCornerTolerance = 1e-9;
inline constexpr double kPenetrationTolerance = 1e-9;
inline constexpr double kDefaultEpsilon = 0.1;

/// Vertex position in polar form about the body origin.
struct PolarPoint {
  double r = 0.0;
  double alpha = 0.0;
};

/// Edge i runs from vertex e0 = i to vertex e1 = i + 1 (cyclic).
struct Edge {
  std::size_t e0 = 0;
  std::size_t e1 = 0;
  double length = 0.0;
  double inv_length = 0.0;
};

enum class CornerKind { convex, concave, flat };

/// Simple polygon in body-local coordinates, stored counter-clockwise.
///
/// Construction validates the loop (at least three finite vertices, no
/// zero-length edges, no self-intersection, non-zero area) and reverses
/// clockwise input. Polar forms and edge data are precomputed so that the
/// world-frame kernels only need the body pose.
class Polygon {
 public:
  explicit Polygon(std::vector<Vec2> vertices);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(std::size_t i) const;
  const PolarPoint& polar(std::size_t i) const;
  const Edge& edge(std::size_t i) const;
  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t next(std::size_t i) const { return (i + 1) % size(); }
  std::size_t prev(std::size_t i) const { return (i + size() - 1) % size(); }

  /// Outward unit normal of edge i in the local frame.
  Vec2 local_normal(std::size_t edge_index) const;

  bool reversed_on_load() const { return reversed_; }
  double area() const;
  double perimeter() const;
  Vec2 centroid() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<PolarPoint> polar_;
  std::vector<Edge> edges_;
  bool reversed_ = false;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 translation() const { return {x, y}; }
  Vec3 vector() const { return {x, y, theta}; }
  bool operator==(const Pose&) const = default;
};

struct Body {
  std::string name;
  Polygon polygon;
  Pose pose;
  bool fixed = false;
};

/// Symmetric box limits applied to every free DOF of a displacement.
struct TrustRegion {
  double translation = 0.0;
  double rotation = 0.0;
};

struct Scene {
  std::vector<Body> bodies;
  double epsilon = kDefaultEpsilon;
  std::optional<TrustRegion> bounds;
};

/// First column of each body's (x, y, theta) block, or -1 for fixed bodies.
std::vector<int> column_blocks(const Scene& scene);
std::size_t free_body_count(const Scene& scene);
inline std::size_t dof_count(const Scene& scene) { return 3 * free_body_count(scene); }

/// Throws InputError on an empty scene or non-positive epsilon and
/// GeometryError on non-finite poses.
void validate_scene(const Scene& scene);

namespace kernel {

/// p = (x + r cos(theta + alpha), y + r sin(theta + alpha)).
template <typename Scalar>
Vector2<Scalar> world_point(const Vector3<Scalar>& pose, const PolarPoint& p) {
  using std::cos;
  using std::sin;
  const Scalar angle = pose(2) + p.alpha;
  return Vector2<Scalar>(pose(0) + p.r * cos(angle), pose(1) + p.r * sin(angle));
}

/// Outward normal of the edge with endpoints e0, e1 (polar, body 1 frame).
template <typename Scalar>
Vector2<Scalar> edge_normal(const Vector3<Scalar>& pose, const PolarPoint& e0,
                            const PolarPoint& e1, double inv_length) {
  using std::cos;
  using std::sin;
  const Scalar s0 = sin(pose(2) + e0.alpha);
  const Scalar c0 = cos(pose(2) + e0.alpha);
  const Scalar s1 = sin(pose(2) + e1.alpha);
  const Scalar c1 = cos(pose(2) + e1.alpha);
  return Vector2<Scalar>(inv_length * (e1.r * s1 - e0.r * s0),
                         inv_length * (-e1.r * c1 + e0.r * c0));
}

/// d = n(q1) . (p(q2) - o(q1)); body 1 supplies the edge, body 2 the vertex.
template <typename Scalar>
Scalar edge_vertex_distance(const Vector3<Scalar>& q1, const PolarPoint& e0,
                            const PolarPoint& e1, double inv_length,
                            const Vector3<Scalar>& q2, const PolarPoint& p) {
  const Vector2<Scalar> n = edge_normal(q1, e0, e1, inv_length);
  const Vector2<Scalar> o = world_point(q1, e0);
  const Vector2<Scalar> w = world_point(q2, p);
  return n.dot(w - o);
}

template <typename Scalar>
Vector2<Scalar> rotate(const Vec2& v, const Scalar& theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(theta);
  const Scalar s = sin(theta);
  return Vector2<Scalar>(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

/// Distance of a body-2 point from a half-plane rigidly attached to body 1.
template <typename Scalar>
Scalar half_plane_distance(const Vector3<Scalar>& q1, const Vec2& anchor_local,
                           const Vec2& normal_local, const Vector3<Scalar>& q2,
                           const Vec2& point_local) {
  const Vector2<Scalar> n = rotate(normal_local, q1(2));
  const Vector2<Scalar> o = q1.template head<2>() + rotate(anchor_local, q1(2));
  const Vector2<Scalar> p = q2.template head<2>() + rotate(point_local, q2(2));
  return n.dot(p - o);
}

}  // namespace kernel

inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 world_vertex(const Body& body, std::size_t vertex_index);
std::vector<Vec2> world_vertices(const Body& body);
Vec2 edge_normal(const Body& body, std::size_t edge_index);
double signed_distance(const Body& edge_body, std::size_t edge_index,
                       const Body& vertex_body, std::size_t vertex_index);
Box2 world_bounds(const Body& body);
/// Diagonal of the bounding box of every body in the scene.
double structure_diameter(const Scene& scene);

CornerKind classify_corner(const Polygon& polygon, std::size_t vertex_index);

/// Offsets every edge inward by depth and re-intersects neighbouring lines.
Polygon inset_polygon(const Polygon& polygon, double depth);

// Loop-level helpers shared by the overlap and visibility code.
double signed_area(const std::vector<Vec2>& loop);
bool point_in_loop(const std::vector<Vec2>& loop, const Vec2& p);
double distance_to_loop(const std::vector<Vec2>& loop, const Vec2& p);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
bool segments_cross_properly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);
bool is_simple_loop(const std::vector<Vec2>& loop);

/// Deepest vertex of one polygon inside the other, measured to the
/// boundary. Infinite when edges cross with no vertex inside or the two
/// regions coincide; boundary pieces running through the other interior
/// along collinear edges count by their midpoint depth.
struct Overlap {
  double depth = 0.0;
  std::size_t outer_body = 0;
  std::size_t inner_body = 0;
  std::size_t inner_vertex = 0;
};
Overlap overlap_depth(const Scene& scene, std::size_t a, std::size_t b);

/// Largest overlap over every body pair that involves a free body.
Overlap max_overlap(const Scene& scene);

struct VertexRef {
  std::size_t body = 0;
  std::size_t vertex = 0;
  bool operator==(const VertexRef&) const = default;
};

/// Cross-body vertex pairs whose open connecting segment avoids every
/// body interior (including the interiors of the two endpoint bodies).
std::vector<std::pair<VertexRef, VertexRef>> mutually_visible_pairs(const Scene& scene);

/// Largest distance to the boundary among midpoints of the pieces of ab
/// (split at boundary crossings) that lie inside the loop; 0 if none do.
double segment_interior_depth(const std::vector<Vec2>& loop, const Vec2& a, const Vec2& b);
bool segment_hits_interior(const std::vector<Vec2>& loop, const Vec2& a, const Vec2& b);

}  // namespace flexlp
