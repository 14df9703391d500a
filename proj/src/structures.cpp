#include "flexlp/structures.hpp"

#include <cmath>
#include <string>

namespace flexlp::structures {

namespace {

// Tab profile, in cell units: neck spans [kNeckLo, kNeckHi] across the
// interface and reaches kNeckDepth; the head spans [kHeadLo, kHeadHi] and
// reaches kHeadDepth.
constexpr double kNeckLo = 0.42;
constexpr double kNeckHi = 0.58;
constexpr double kHeadLo = 0.35;
constexpr double kHeadHi = 0.65;
constexpr double kNeckDepth = 0.12;
constexpr double kHeadDepth = 0.25;

// Interface profile from (0, 0) to (1, 0) bulging towards +y.
std::vector<Vec2> tab_profile() {
  return {{kNeckLo, 0.0},        {kNeckLo, kNeckDepth}, {kHeadLo, kNeckDepth}, {kHeadLo, kHeadDepth},
          {kHeadHi, kHeadDepth}, {kHeadHi, kNeckDepth}, {kNeckHi, kNeckDepth}, {kNeckHi, 0.0}};
}

std::vector<Vec2> piece_outline(bool bottom_notch, bool right_tab, bool top_tab, bool left_notch) {
  const std::vector<Vec2> profile = tab_profile();
  std::vector<Vec2> loop;
  loop.emplace_back(0.0, 0.0);
  if (bottom_notch)
    for (const Vec2& p : profile) loop.emplace_back(p.x(), p.y());
  loop.emplace_back(1.0, 0.0);
  if (right_tab)
    for (const Vec2& p : profile) loop.emplace_back(1.0 + p.y(), p.x());
  loop.emplace_back(1.0, 1.0);
  if (top_tab)
    for (auto it = profile.rbegin(); it != profile.rend(); ++it) loop.emplace_back(it->x(), 1.0 + it->y());
  loop.emplace_back(0.0, 1.0);
  if (left_notch)
    for (auto it = profile.rbegin(); it != profile.rend(); ++it) loop.emplace_back(it->y(), it->x());
  return loop;
}

}  // namespace

Polygon rectangle(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

Scene jigsaw(const JigsawLayout& layout) {
  if (layout.rows < 1 || layout.cols < 1) throw InputError("jigsaw needs at least one row and column");
  const auto cells = static_cast<std::size_t>(layout.rows * layout.cols);
  if (!layout.occupied.empty() && layout.occupied.size() != cells)
    throw InputError("jigsaw occupancy mask has the wrong size");
  const auto occupied = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= layout.rows || c >= layout.cols) return false;
    return layout.occupied.empty() || layout.occupied[static_cast<std::size_t>(r * layout.cols + c)];
  };

  Scene scene;
  scene.epsilon = layout.epsilon;
  for (int r = 0; r < layout.rows; ++r) {
    for (int c = 0; c < layout.cols; ++c) {
      if (!occupied(r, c)) continue;
      Polygon raw(piece_outline(occupied(r - 1, c), occupied(r, c + 1), occupied(r + 1, c), occupied(r, c - 1)));
      Body body{"P" + std::to_string(r) + "_" + std::to_string(c), inset_polygon(raw, 0.5 * layout.gap),
                Pose{static_cast<double>(c), static_cast<double>(r), 0.0}, scene.bodies.empty()};
      scene.bodies.push_back(std::move(body));
    }
  }
  if (scene.bodies.empty()) throw InputError("jigsaw layout has no occupied cells");
  return scene;
}

Scene jigsaw_grid(int rows, int cols, double gap, double epsilon) {
  return jigsaw({rows, cols, {}, gap, epsilon});
}

std::pair<int, int> grid_shape(int n) {
  if (n < 1) throw InputError("structure size must be positive");
  int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  while (rows > 1 && n % rows != 0) --rows;
  return {rows, n / rows};
}

Scene jigsaw_frame(int side, double gap, double epsilon) {
  if (side < 3) throw InputError("frame side must be at least 3");
  JigsawLayout layout{side, side, {}, gap, epsilon};
  layout.occupied.assign(static_cast<std::size_t>(side * side), false);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      layout.occupied[static_cast<std::size_t>(r * side + c)] = r == 0 || c == 0 || r == side - 1 || c == side - 1;
  return jigsaw(layout);
}

Scene block_in_cavity(double gap, double epsilon) {
  const double inner = 1.0 + 2.0 * gap;
  const double w = 1.0;
  Scene scene;
  scene.epsilon = epsilon;
  scene.bodies.push_back({"bottom", rectangle(0.0, -w, inner + w, 0.0), {}, true});
  scene.bodies.push_back({"right", rectangle(inner, 0.0, inner + w, inner + w), {}, true});
  scene.bodies.push_back({"top", rectangle(-w, inner, inner, inner + w), {}, true});
  scene.bodies.push_back({"left", rectangle(-w, -w, 0.0, inner), {}, true});
  scene.bodies.push_back({"block", rectangle(-0.5, -0.5, 0.5, 0.5), {gap + 0.5, gap + 0.5, 0.0}, false});
  return scene;
}

Scene two_squares(double gap, double epsilon) {
  Scene scene;
  scene.epsilon = epsilon;
  scene.bodies.push_back({"A", rectangle(0.0, 0.0, 1.0, 1.0), {}, false});
  scene.bodies.push_back({"B", rectangle(0.0, 0.0, 1.0, 1.0), {1.0 + gap, 0.0, 0.0}, true});
  return scene;
}

Scene block_in_slot(double gap, double epsilon) {
  const double slot = 1.0 + 2.0 * gap;
  Scene scene;
  scene.epsilon = epsilon;
  scene.bodies.push_back({"base",
                          Polygon({{-1.0, -1.0},
                                   {slot + 1.0, -1.0},
                                   {slot + 1.0, 1.0},
                                   {slot, 1.0},
                                   {slot, 0.0},
                                   {0.0, 0.0},
                                   {0.0, 1.0},
                                   {-1.0, 1.0}}),
                          {},
                          true});
  scene.bodies.push_back({"block", rectangle(0.0, 0.0, 1.0, 1.0), {gap, gap, 0.0}, false});
  return scene;
}

}  // namespace flexlp::structures
