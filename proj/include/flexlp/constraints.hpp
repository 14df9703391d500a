#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <vector>

#include "flexlp/geometry.hpp"

namespace flexlp {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Row6 = Eigen::Matrix<double, 6, 1>;

/// Raw edge-vertex pair that passed the proximity gate.
struct ProximityCandidate {
  std::size_t edge_body = 0;
  std::size_t edge_index = 0;
  std::size_t vertex_body = 0;
  std::size_t vertex_index = 0;
  double distance = 0.0;    // signed distance to the edge line
  double projection = 0.0;  // position along the edge, measured from e0
};

enum class PairKind { plain, averaged_normal };

/// One distance constraint. Body "1" (edge_body) supplies the edge or
/// corner, body "2" (vertex_body) the vertex.
struct ConstraintPair {
  std::size_t edge_body = 0;
  std::size_t edge_index = 0;
  std::size_t vertex_body = 0;
  std::size_t vertex_index = 0;
  PairKind kind = PairKind::plain;
  // averaged_normal only: the convex corner vertex on edge_body and the
  // edges entering and leaving it.
  std::size_t corner = 0;
  std::array<std::size_t, 2> corner_edges{};

  bool operator==(const ConstraintPair&) const = default;
};

struct SelectionOptions {
  /// Signed distances in [-tol, 0) count as touching and enter d0 as 0;
  /// overlaps deeper than this raise PenetrationError.
  double penetration_tolerance = kPenetrationTolerance;
};

/// Enumerates gated edge-vertex pairs over every body pair that involves a
/// free body. Throws PenetrationError on overlap beyond the tolerance.
std::vector<ProximityCandidate> proximity_candidates(const Scene& scene,
                                                     const SelectionOptions& options = {});

/// Role assignment for a candidate near a corner.
///
/// Returns the constraints that replace the candidate: itself when the vertex
/// faces the edge or a concave corner, the facing neighbour edge when the
/// vertex is past the candidate's endpoint but in front of the adjacent edge,
/// one averaged_normal pair for convex-convex corner encounters, and the
/// swapped edge pairs when a convex corner meets a concave/flat vertex.
std::vector<ConstraintPair> orient_pair(const Scene& scene, const ProximityCandidate& candidate,
                                        const SelectionOptions& options = {});

/// Candidates, oriented and de-duplicated, in deterministic order.
std::vector<ConstraintPair> select_pairs(const Scene& scene, const SelectionOptions& options = {});

/// Value and partials (x1, y1, theta1, x2, y2, theta2) of one distance row.
struct RowGradient {
  double distance = 0.0;
  Row6 partials = Row6::Zero();
};

/// Half-plane (anchor, normal) attached to pose1 against a point attached to pose2.
RowGradient half_plane_row(const Pose& pose1, const Vec2& anchor_local, const Vec2& normal_local,
                           const Pose& pose2, const Vec2& point_local);

RowGradient gradient_row(const Scene& scene, const ConstraintPair& pair);
RowGradient averaged_normal_row(const Scene& scene, const ConstraintPair& pair);

/// d0 and J_d for the selected pairs; three columns per free body.
struct DistanceSystem {
  std::vector<ConstraintPair> pairs;
  Eigen::VectorXd d0;
  SparseRows jacobian;
  std::vector<int> columns;

  Eigen::Index rows() const { return jacobian.rows(); }
  Eigen::Index cols() const { return jacobian.cols(); }
};

DistanceSystem assemble(const Scene& scene, const SelectionOptions& options = {});

/// d0 and J_d for caller-chosen pairs; no selection, no clamping.
DistanceSystem assemble(const Scene& scene, std::vector<ConstraintPair> pairs);

/// Scatters a 6-partial row into the free-body columns of the two bodies.
void append_row(std::vector<Eigen::Triplet<double>>& triplets, Eigen::Index row,
                const std::vector<int>& columns, std::size_t body1, std::size_t body2,
                const Row6& partials);

}  // namespace flexlp
