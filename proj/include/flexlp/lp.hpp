#pragma once

#include <Eigen/Core>

#include <optional>

#include "flexlp/constraints.hpp"
#include "flexlp/simplex.hpp"

namespace flexlp {

/// Stacked (dx, dy, dtheta) per free body, time scaled so that dt = 1.
using Displacement = Eigen::VectorXd;

enum class ObjectiveSource { direct, direction, radial, leader_x };

struct Objective {
  Eigen::VectorXd weights;
  ObjectiveSource source = ObjectiveSource::direct;
};

/// Throws InputError on a length mismatch, non-finite, or all-zero weights.
void validate_objective(const Objective& objective, Eigen::Index dofs);

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

inline constexpr double kDefaultRotationBound = 0.5;
inline constexpr double kDefaultSeparationK = 1e6;

/// Scene bounds when present, else +-10 epsilon on translations and
/// +-0.5 rad on rotations.
Bounds default_bounds(const Scene& scene);
Bounds scale_bounds(const Bounds& bounds, double factor);

/// dq shrunk uniformly (never grown) until it lies inside the box.
Eigen::VectorXd fit_to_bounds(const Eigen::VectorXd& dq, const Bounds& bounds);

/// Extra rows of the form rows * dq + offset >= 0.
struct AuxRows {
  SparseRows rows;
  Eigen::VectorXd offset;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Displacement displacement;
  double objective = 0.0;
  long iterations = 0;
};

/// maximize c'dq  s.t.  J dq + d0 >= 0, box bounds, and any extra rows.
LpResult solve_flex(const DistanceSystem& system, const Objective& objective, const Bounds& bounds,
                    const AuxRows* extra = nullptr);

enum class SeparationSign { positive, negative };

/// Translation DOFs unbounded, rotations kept within the scene's rotation
/// limit so the LP stays finite.
Bounds separation_bounds(const Scene& scene);

/// Box for stepping along a separating direction: translations may reach
/// the structure diameter so an escaping body can actually clear.
Bounds escape_bounds(const Scene& scene);

/// Flex LP plus the two rows that pin sum(dx_i + dy_i) into [k, 2k]
/// (positive) or [-2k, -k] (negative). Without an objective the
/// translation DOFs get weight one.
LpResult solve_separation(const DistanceSystem& system, double k, SeparationSign sign,
                          const Bounds& bounds, const std::optional<Objective>& objective = std::nullopt);

struct SeparationVerdict {
  bool separable = false;
  SeparationSign sign = SeparationSign::positive;
  Displacement displacement;
};

/// Tries the positive sum first, then the negative one. An inseparable
/// verdict does not rule out escapes whose translation sum is exactly zero.
SeparationVerdict classify_separability(const Scene& scene, double k = kDefaultSeparationK);

}  // namespace flexlp
