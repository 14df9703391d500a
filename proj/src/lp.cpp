#include "flexlp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace flexlp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinearProgram build_program(const DistanceSystem& system, const Eigen::VectorXd& weights,
                            const Bounds& bounds, const AuxRows* extra,
                            const std::vector<std::pair<Eigen::VectorXd, double>>& dense_rows) {
  const Eigen::Index n = system.cols();
  if (bounds.lower.size() != n || bounds.upper.size() != n)
    throw InputError("bounds do not match the number of free DOFs");
  if (extra && (extra->rows.cols() != n || extra->rows.rows() != extra->offset.size()))
    throw InputError("auxiliary rows do not match the number of free DOFs");

  const Eigen::Index m_sys = system.rows();
  const Eigen::Index m_aux = extra ? extra->rows.rows() : 0;
  const auto m_dense = static_cast<Eigen::Index>(dense_rows.size());
  const Eigen::Index m = m_sys + m_aux + m_dense;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(system.jacobian.nonZeros() + (extra ? extra->rows.nonZeros() : 0) +
                                            m_dense * n));
  const auto copy_rows = [&](const SparseRows& rows, Eigen::Index offset) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      for (SparseRows::InnerIterator it(rows, i); it; ++it) triplets.emplace_back(offset + i, it.col(), it.value());
  };
  copy_rows(system.jacobian, 0);
  if (extra) copy_rows(extra->rows, m_sys);

  LinearProgram lp;
  lp.rhs.resize(m);
  lp.rhs.head(m_sys) = -system.d0;
  if (extra) lp.rhs.segment(m_sys, m_aux) = -extra->offset;
  for (Eigen::Index r = 0; r < m_dense; ++r) {
    const auto& [row, offset] = dense_rows[static_cast<std::size_t>(r)];
    for (Eigen::Index j = 0; j < n; ++j)
      if (row(j) != 0.0) triplets.emplace_back(m_sys + m_aux + r, j, row(j));
    lp.rhs(m_sys + m_aux + r) = -offset;
  }
  lp.rows.resize(m, n);
  lp.rows.setFromTriplets(triplets.begin(), triplets.end());
  lp.objective = weights;
  lp.lower = bounds.lower;
  lp.upper = bounds.upper;
  return lp;
}

LpResult to_result(const SimplexResult& r) {
  LpResult out;
  out.status = r.status;
  out.iterations = r.iterations;
  if (r.status == LpStatus::optimal) {
    out.displacement = r.x;
    out.objective = r.objective;
  }
  return out;
}

}  // namespace

void validate_objective(const Objective& objective, Eigen::Index dofs) {
  if (objective.weights.size() != dofs)
    throw InputError("objective has " + std::to_string(objective.weights.size()) + " weights, scene has " +
                     std::to_string(dofs) + " free DOFs");
  if (!objective.weights.allFinite()) throw InputError("objective weights must be finite");
  if (dofs > 0 && objective.weights.cwiseAbs().maxCoeff() == 0.0)
    throw InputError("objective weights are all zero");
}

Bounds default_bounds(const Scene& scene) {
  const TrustRegion region = scene.bounds.value_or(TrustRegion{10.0 * scene.epsilon, kDefaultRotationBound});
  const auto n = static_cast<Eigen::Index>(dof_count(scene));
  Bounds b;
  b.upper.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) b.upper(j) = (j % 3 == 2) ? region.rotation : region.translation;
  b.lower = -b.upper;
  return b;
}

Bounds scale_bounds(const Bounds& bounds, double factor) { return {bounds.lower * factor, bounds.upper * factor}; }

Eigen::VectorXd fit_to_bounds(const Eigen::VectorXd& dq, const Bounds& bounds) {
  double factor = 1.0;
  for (Eigen::Index j = 0; j < dq.size(); ++j) {
    if (dq(j) > bounds.upper(j)) factor = std::min(factor, bounds.upper(j) / dq(j));
    if (dq(j) < bounds.lower(j)) factor = std::min(factor, bounds.lower(j) / dq(j));
  }
  return factor * dq;
}

LpResult solve_flex(const DistanceSystem& system, const Objective& objective, const Bounds& bounds,
                    const AuxRows* extra) {
  validate_objective(objective, system.cols());
  if (system.d0.size() != system.rows()) throw InputError("distance system rows and d0 disagree");
  return to_result(solve_simplex(build_program(system, objective.weights, bounds, extra, {})));
}

Bounds separation_bounds(const Scene& scene) {
  const double rotation = scene.bounds ? scene.bounds->rotation : kDefaultRotationBound;
  const auto n = static_cast<Eigen::Index>(dof_count(scene));
  Bounds b;
  b.upper.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) b.upper(j) = (j % 3 == 2) ? rotation : kInf;
  b.lower = -b.upper;
  return b;
}

Bounds escape_bounds(const Scene& scene) {
  Bounds b = separation_bounds(scene);
  const double reach = structure_diameter(scene);
  for (Eigen::Index j = 0; j < b.upper.size(); ++j) {
    if (j % 3 != 2) b.upper(j) = reach;
  }
  b.lower = -b.upper;
  return b;
}

LpResult solve_separation(const DistanceSystem& system, double k, SeparationSign sign, const Bounds& bounds,
                          const std::optional<Objective>& objective) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InputError("separation constant k must be positive");
  const Eigen::Index n = system.cols();
  Eigen::VectorXd sum_row = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j)
    if (j % 3 != 2) sum_row(j) = 1.0;

  Objective obj = objective.value_or(Objective{sum_row, ObjectiveSource::direct});
  if (n == 0) {
    LpResult trivial;
    trivial.status = LpStatus::optimal;
    trivial.displacement = Eigen::VectorXd::Zero(0);
    return trivial;
  }
  validate_objective(obj, n);

  const double s = sign == SeparationSign::positive ? 1.0 : -1.0;
  // s * sum - k >= 0  and  -s * sum + 2k >= 0
  const std::vector<std::pair<Eigen::VectorXd, double>> rows{{s * sum_row, -k}, {-s * sum_row, 2.0 * k}};
  return to_result(solve_simplex(build_program(system, obj.weights, bounds, nullptr, rows)));
}

SeparationVerdict classify_separability(const Scene& scene, double k) {
  const DistanceSystem system = assemble(scene);
  const Bounds bounds = separation_bounds(scene);
  for (SeparationSign sign : {SeparationSign::positive, SeparationSign::negative}) {
    const LpResult r = solve_separation(system, k, sign, bounds);
    if (r.status == LpStatus::optimal) return {true, sign, r.displacement};
  }
  return {false, SeparationSign::positive, Eigen::VectorXd::Zero(system.cols())};
}

}  // namespace flexlp
