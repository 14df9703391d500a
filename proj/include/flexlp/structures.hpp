#pragma once

#include <string>
#include <vector>

#include "flexlp/geometry.hpp"

namespace flexlp::structures {

/// Axis-aligned rectangle [x0, x1] x [y0, y1] as a local polygon.
Polygon rectangle(double x0, double y0, double x1, double y1);

/// Occupancy grid of unit jigsaw pieces joined by T-shaped tabs. Piece
/// (row, col) sits at pose (col, row, 0); neighbouring pieces interlock and
/// every piece is inset by gap / 2, so facing boundaries are gap apart.
struct JigsawLayout {
  int rows = 1;
  int cols = 1;
  std::vector<bool> occupied;  // row-major; empty means all occupied
  double gap = 0.02;
  double epsilon = 0.05;
};

/// Body order is row-major over occupied cells; the first one is fixed.
Scene jigsaw(const JigsawLayout& layout);

/// rows x cols jigsaw with one fixed piece in the lower-left corner.
Scene jigsaw_grid(int rows, int cols, double gap = 0.02, double epsilon = 0.05);

/// Closest rows x cols factorisation of n (rows <= cols).
std::pair<int, int> grid_shape(int n);

/// Hollow square frame of jigsaw pieces (side >= 3), ring one piece wide.
Scene jigsaw_frame(int side, double gap = 0.02, double epsilon = 0.05);

/// Unit square (free, last body, centred on its pose) in a cavity of side
/// 1 + 2 gap built from four fixed walls in a pinwheel arrangement.
Scene block_in_cavity(double gap, double epsilon = kDefaultEpsilon);

/// Free unit square "A" at the origin, fixed unit square "B" gap to its right.
Scene two_squares(double gap, double epsilon = kDefaultEpsilon);

/// Fixed U-shaped base with a free unit block resting in its slot, open at the top.
Scene block_in_slot(double gap, double epsilon = kDefaultEpsilon);

}  // namespace flexlp::structures
