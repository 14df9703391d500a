#pragma once

// Independent helpers for the oracles: nothing here calls the library's own
// loop predicates.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "flexlp/geometry.hpp"

namespace test {

using flexlp::Vec2;

inline std::string data(const std::string& name) { return std::string(FLEXLP_TEST_DATA) + "/" + name; }

/// Star-shaped about the origin, so simple and counter-clockwise.
inline flexlp::Polygon random_star_polygon(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> jitter(0.2, 0.8);
  std::uniform_real_distribution<double> radius(0.3, 1.5);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * (double(i) + jitter(rng)) / double(n);
    const double r = radius(rng);
    pts.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return flexlp::Polygon(pts);
}

inline flexlp::Polygon random_convex_polygon(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> jitter(0.2, 0.8);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);
  const Vec2 c(shift(rng), shift(rng));
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * (double(i) + jitter(rng)) / double(n);
    pts.push_back(c + Vec2(std::cos(a), std::sin(a)));
  }
  return flexlp::Polygon(pts);
}

inline bool inside_loop(const std::vector<Vec2>& loop, const Vec2& p) {
  bool in = false;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
      in = !in;
    }
  }
  return in;
}

inline double boundary_distance(const std::vector<Vec2>& loop, const Vec2& p) {
  double best = INFINITY;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % loop.size()];
    const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * (b - a) - p).norm());
  }
  return best;
}

/// Strict interior, with a margin so boundary-grazing samples do not count.
inline bool strictly_inside_any(const flexlp::Scene& scene, const Vec2& p, double margin = 1e-7) {
  for (const flexlp::Body& b : scene.bodies) {
    const std::vector<Vec2> w = flexlp::world_vertices(b);
    if (inside_loop(w, p) && boundary_distance(w, p) > margin) return true;
  }
  return false;
}

inline bool sampled_visibility(const flexlp::Scene& scene, const Vec2& a, const Vec2& b, int samples = 2000) {
  for (int i = 1; i < samples; ++i) {
    if (strictly_inside_any(scene, a + (b - a) * (double(i) / samples))) return false;
  }
  return true;
}

/// Distance between two non-overlapping polygons: the closest
/// vertex-to-boundary distance either way.
inline double clearance(const flexlp::Body& a, const flexlp::Body& b) {
  const std::vector<Vec2> wa = flexlp::world_vertices(a), wb = flexlp::world_vertices(b);
  double best = INFINITY;
  for (const Vec2& p : wa) best = std::min(best, boundary_distance(wb, p));
  for (const Vec2& p : wb) best = std::min(best, boundary_distance(wa, p));
  return best;
}

/// Deepest sampled boundary point of one body inside another; an
/// overlap oracle independent of the library's vertex-based check.
inline double sampled_overlap(const flexlp::Scene& scene, int per_edge = 200) {
  double worst = 0.0;
  for (std::size_t i = 0; i < scene.bodies.size(); ++i) {
    const std::vector<Vec2> wi = flexlp::world_vertices(scene.bodies[i]);
    for (std::size_t j = 0; j < scene.bodies.size(); ++j) {
      if (i == j || (scene.bodies[i].fixed && scene.bodies[j].fixed)) continue;
      const std::vector<Vec2> wj = flexlp::world_vertices(scene.bodies[j]);
      for (std::size_t e = 0; e < wi.size(); ++e) {
        const Vec2& a = wi[e];
        const Vec2& b = wi[(e + 1) % wi.size()];
        for (int k = 0; k <= per_edge; ++k) {
          const Vec2 p = a + (b - a) * (double(k) / per_edge);
          if (inside_loop(wj, p)) worst = std::max(worst, boundary_distance(wj, p));
        }
      }
    }
  }
  return worst;
}

}  // namespace test
