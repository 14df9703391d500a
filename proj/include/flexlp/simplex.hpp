#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace flexlp {

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

/// maximize c'x  subject to  A x >= b,  lower <= x <= upper.
/// Bounds may be infinite.
struct LinearProgram {
  Eigen::SparseMatrix<double, Eigen::RowMajor> rows;
  Eigen::VectorXd rhs;
  Eigen::VectorXd objective;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-7;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_limit = 50;
  /// Every constraint is loosened by a deterministic amount of this order
  /// while pivoting; the final vertex is recomputed without it.
  double perturbation = 1e-9;
  long max_iterations = 0;  // 0: automatic
};

struct SimplexResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  long iterations = 0;
};

/// Primal simplex over vertices of {A x >= b, box}. The basis holds the n
/// active constraint normals, so the dense work per pivot is O(n^2) in the
/// number of variables and O(nnz(A)) for the ratio test. Starts from the
/// box-clamped origin; an infeasible start runs a one-variable phase 1.
SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace flexlp
