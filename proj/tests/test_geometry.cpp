#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "flexlp/error.hpp"
#include "flexlp/geometry.hpp"
#include "flexlp/structures.hpp"
#include "test_util.hpp"

using namespace flexlp;
using flexlp::structures::rectangle;
using std::numbers::pi;

namespace {

Body square_at(double x, double y, double theta = 0.0, bool fixed = false) {
  return Body{"sq", rectangle(0, 0, 1, 1), Pose{x, y, theta}, fixed};
}

Polygon l_shape() { return Polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}); }

}  // namespace

TEST_CASE("polygon construction validates and normalises orientation") {
  const Polygon ccw({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK_FALSE(ccw.reversed_on_load());
  CHECK(ccw.area() == doctest::Approx(1.0));

  const Polygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(cw.reversed_on_load());
  CHECK(signed_area(cw.vertices()) > 0.0);

  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), GeometryError);  // bow tie
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), GeometryError);  // zero-length edge
  CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}, {2, 0}}), GeometryError);          // no area
  CHECK_THROWS_AS(Polygon({{0, 0}, {NAN, 0}, {0, 1}}), GeometryError);
}

TEST_CASE("polar form reproduces vertices and edges carry reciprocal lengths") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon poly = test::random_star_polygon(rng, 3 + trial % 9);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const PolarPoint& p = poly.polar(i);
      const Vec2 back(p.r * std::cos(p.alpha), p.r * std::sin(p.alpha));
      CHECK((back - poly.vertex(i)).norm() <= 1e-12);
      const Edge& e = poly.edge(i);
      CHECK(e.length > 0.0);
      CHECK(e.length * e.inv_length == doctest::Approx(1.0));
      CHECK(e.e1 == poly.next(i));
    }
  }
}

TEST_CASE("world_vertex examples") {
  CHECK((world_vertex(square_at(0, 0), 1) - Vec2(1, 0)).norm() == 0.0);
  CHECK((world_vertex(square_at(2, 3), 1) - Vec2(3, 3)).norm() == 0.0);
  CHECK((world_vertex(square_at(0, 0, pi / 2), 1) - Vec2(0, 1)).norm() <= 1e-15);
  CHECK_THROWS(world_vertex(square_at(0, 0), 4));
}

TEST_CASE("edge_normal examples and properties") {
  CHECK((edge_normal(square_at(0, 0), 0) - Vec2(0, -1)).norm() <= 1e-15);
  CHECK((edge_normal(square_at(0, 0, pi / 2), 0) - Vec2(1, 0)).norm() <= 1e-15);
  CHECK_THROWS(edge_normal(square_at(0, 0), 9));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Body body{"p", test::random_convex_polygon(rng, 3 + trial % 8), Pose{u(rng), u(rng), u(rng)}, false};
    const std::vector<Vec2> w = world_vertices(body);
    Vec2 centroid = Vec2::Zero();
    for (const Vec2& p : w) centroid += p;
    centroid /= double(w.size());
    for (std::size_t e = 0; e < w.size(); ++e) {
      const Vec2 n = edge_normal(body, e);
      const Vec2 dir = w[(e + 1) % w.size()] - w[e];
      CHECK(std::abs(n.norm() - 1.0) <= 1e-12);
      CHECK(std::abs(n.dot(dir)) <= 1e-12 * dir.norm());
      CHECK(n.dot(centroid - w[e]) < 0.0);
    }
  }
}

TEST_CASE("signed_distance examples") {
  const Body sq = square_at(0, 0);
  const auto point_body = [](double x, double y) { return Body{"p", rectangle(0, 0, 0.1, 0.1), Pose{x, y, 0}, false}; };
  CHECK(signed_distance(sq, 0, point_body(0.5, -0.2), 0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(std::abs(signed_distance(sq, 0, point_body(0.5, 0.0), 0)) <= 1e-15);
  CHECK(signed_distance(sq, 0, point_body(0.5, 0.3), 0) == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("signed_distance is rigid-motion invariant and affine in the vertex translation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    Body a{"a", test::random_star_polygon(rng, 5), Pose{u(rng), u(rng), u(rng)}, false};
    Body b{"b", test::random_star_polygon(rng, 4), Pose{u(rng), u(rng), u(rng)}, false};
    const std::size_t e = trial % a.polygon.size();
    const std::size_t v = trial % b.polygon.size();
    const double d = signed_distance(a, e, b, v);

    // Same rigid motion applied to both bodies.
    const double phi = u(rng);
    const Vec2 shift(u(rng), u(rng));
    auto move = [&](Body body) {
      const Vec2 t = kernel::rotate(body.pose.translation(), phi) + shift;
      body.pose = Pose{t.x(), t.y(), body.pose.theta + phi};
      return body;
    };
    CHECK(std::abs(signed_distance(move(a), e, move(b), v) - d) <= 1e-9);

    const Vec2 delta(u(rng), u(rng));
    Body b2 = b;
    b2.pose.x += delta.x();
    b2.pose.y += delta.y();
    const double expected = d + edge_normal(a, e).dot(delta);
    CHECK(std::abs(signed_distance(a, e, b2, v) - expected) <= 1e-12);
  }
}

TEST_CASE("corner classification") {
  const Polygon sq = rectangle(0, 0, 1, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(classify_corner(sq, i) == CornerKind::convex);
  const Polygon l = l_shape();
  CHECK(classify_corner(l, 3) == CornerKind::concave);
  CHECK(classify_corner(l, 0) == CornerKind::convex);
  const Polygon flat({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(classify_corner(flat, 1) == CornerKind::flat);
}

TEST_CASE("inset_polygon") {
  const Polygon sq = rectangle(0, 0, 1, 1);
  const Polygon in = inset_polygon(sq, 0.1);
  REQUIRE(in.size() == 4);
  const std::vector<Vec2> expected{{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.9}, {0.1, 0.9}};
  for (std::size_t i = 0; i < 4; ++i) CHECK((in.vertex(i) - expected[i]).norm() <= 1e-12);

  const Polygon l = l_shape();
  const Polygon same = inset_polygon(l, 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) CHECK((same.vertex(i) - l.vertex(i)).norm() <= 1e-15);

  // Rectilinear offset: A(t) = A - P t + (convex - concave) t^2.
  for (double t : {0.01, 0.05, 0.1, 0.3}) {
    const Polygon li = inset_polygon(l, t);
    const double exact = l.area() - l.perimeter() * t + (5.0 - 1.0) * t * t;
    CHECK(li.area() == doctest::Approx(exact).epsilon(1e-12));
    CHECK(l.area() - li.area() > l.perimeter() * t * (1.0 - 0.5));
    CHECK(signed_area(li.vertices()) > 0.0);
  }

  CHECK_THROWS_AS(inset_polygon(sq, 0.5), GeometryError);
  CHECK_THROWS_AS(inset_polygon(l, 0.6), GeometryError);
  CHECK_THROWS_AS(inset_polygon(sq, -0.1), GeometryError);
}

TEST_CASE("overlap depth") {
  Scene s;
  s.bodies = {square_at(0, 0), square_at(0.97, 0, 0, true)};
  CHECK(max_overlap(s).depth == doctest::Approx(0.03).epsilon(1e-9));

  s.bodies[1] = square_at(1.0, 0, 0, true);  // touching
  CHECK(max_overlap(s).depth <= 1e-12);

  s.bodies[1] = square_at(3.0, 0, 0, true);
  CHECK(max_overlap(s).depth == 0.0);

  // Equal-height squares sliding into each other have no vertex strictly
  // inside the other; the collinear edges still reveal the overlap.
  s.bodies[1] = square_at(0.5, 0, 0, true);
  CHECK(max_overlap(s).depth == doctest::Approx(0.5));

  s.bodies[1] = square_at(0, 0, 0, true);
  CHECK(std::isinf(max_overlap(s).depth));

  // A cross: edges intersect with no vertex inside either polygon.
  s.bodies = {Body{"h", rectangle(-2, -0.1, 2, 0.1), Pose{}, false}, Body{"v", rectangle(-0.1, -2, 0.1, 2), Pose{}, true}};
  CHECK(max_overlap(s).depth > 0.0);
}

TEST_CASE("mutually visible pairs against a sampling oracle") {
  Scene s;
  s.bodies = {square_at(0, 0), square_at(3, 0)};
  // Segments through either endpoint's own square are blocked, so of the 16
  // cross pairs only the 10 that avoid both interiors remain.
  const auto open = mutually_visible_pairs(s);
  CHECK(open.size() == 10);
  for (const auto& [a, b] : open) {
    CHECK(test::sampled_visibility(s, world_vertex(s.bodies[a.body], a.vertex), world_vertex(s.bodies[b.body], b.vertex)));
  }

  // Two occluded scenes, including one where the blocker only covers some rays.
  for (double blocker_y : {0.0, 0.6}) {
    s.bodies = {square_at(0, 0), square_at(4, 0), square_at(1.75, blocker_y, 0, true)};
    const auto pairs = mutually_visible_pairs(s);
    std::size_t expected = 0;
    for (std::size_t a = 0; a < s.bodies.size(); ++a) {
      for (std::size_t b = a + 1; b < s.bodies.size(); ++b) {
        for (std::size_t i = 0; i < 4; ++i) {
          for (std::size_t j = 0; j < 4; ++j) {
            const bool oracle = test::sampled_visibility(s, world_vertex(s.bodies[a], i), world_vertex(s.bodies[b], j));
            const bool found = std::find(pairs.begin(), pairs.end(),
                                         std::pair{VertexRef{a, i}, VertexRef{b, j}}) != pairs.end();
            CHECK(oracle == found);
            expected += oracle;
          }
        }
      }
    }
    CHECK(pairs.size() == expected);
    CHECK(expected < 48);
  }

  s.bodies = {square_at(0, 0)};
  CHECK(mutually_visible_pairs(s).empty());
}

TEST_CASE("scene bookkeeping") {
  Scene s;
  s.bodies = {square_at(0, 0, 0, true), square_at(2, 0), square_at(4, 0, 0, true), square_at(6, 0)};
  CHECK(column_blocks(s) == std::vector<int>{-1, 0, -1, 3});
  CHECK(dof_count(s) == 6);
  CHECK_NOTHROW(validate_scene(s));
  s.epsilon = 0.0;
  CHECK_THROWS_AS(validate_scene(s), InputError);
  CHECK_THROWS_AS(validate_scene(Scene{}), InputError);
}
