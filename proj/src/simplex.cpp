#include "flexlp/simplex.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "flexlp/error.hpp"

namespace flexlp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Constraint ids: [0, m) rows, [m, m+n) lower bounds, [m+n, m+2n) upper
// bounds. Negative ids are the temporary "x_j stays put" rows that seed the
// basis; they never re-enter once dropped.
//
// Every constraint is relaxed by a small deterministic amount while pivoting
// (breaks the heavy degeneracy of contact LPs); finish() drops the relaxation
// and recomputes the vertex of the final basis.
class ActiveSetSimplex {
 public:
  ActiveSetSimplex(const LinearProgram& lp, const SimplexOptions& opt, double perturbation)
      : lp_(lp),
        opt_(opt),
        m_(lp.rows.rows()),
        n_(lp.rows.cols()),
        shift_(Eigen::VectorXd::Zero(m_ + 2 * n_)),
        in_basis_(static_cast<std::size_t>(m_ + 2 * n_), 0) {
    if (perturbation > 0.0) {
      std::mt19937_64 rng(0x5eed);
      std::uniform_real_distribution<double> u(0.5, 1.0);
      for (Eigen::Index i = 0; i < shift_.size(); ++i) shift_(i) = perturbation * u(rng);
    }
  }

  LpStatus run(const Eigen::VectorXd& start) {
    x_ = start;
    anchor_ = start;
    basis_.resize(static_cast<std::size_t>(n_));
    for (Eigen::Index j = 0; j < n_; ++j) basis_[static_cast<std::size_t>(j)] = -1 - j;
    binv_.setIdentity(n_, n_);
    update_slacks();

    const long limit = opt_.max_iterations > 0 ? opt_.max_iterations
                                               : std::max<long>(20000, 50 * (m_ + 2 * n_));
    const double cmax = lp_.objective.size() ? lp_.objective.cwiseAbs().maxCoeff() : 0.0;
    const double dual_tol = opt_.optimality_tolerance * std::max(1.0, cmax);
    const double harris = opt_.feasibility_tolerance * 1e-2;

    int since_refactor = 0;
    int degenerate_run = 0;
    bool bland = false;
    Eigen::VectorXd d(n_), ad(m_), lambda(n_);

    for (iterations_ = 0;; ++iterations_) {
      if (iterations_ >= limit) throw Error("simplex iteration limit reached");
      if (since_refactor >= opt_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
      lambda.noalias() = -binv_.transpose() * lp_.objective;

      // Pricing: release seed rows first, then any active row whose
      // multiplier has the wrong sign.
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index r = 0; r < n_; ++r) {
        if (basis_[static_cast<std::size_t>(r)] >= 0) continue;
        const double score = std::abs(lambda(r));
        if (score > dual_tol && (leave < 0 || (!bland && score > best))) {
          leave = r;
          best = score;
          if (bland) break;
        }
      }
      if (leave < 0) {
        long best_id = std::numeric_limits<long>::max();
        for (Eigen::Index r = 0; r < n_; ++r) {
          const long id = basis_[static_cast<std::size_t>(r)];
          if (id < 0 || lambda(r) >= -dual_tol) continue;
          if (bland ? id < best_id : -lambda(r) > best) {
            leave = r;
            best = -lambda(r);
            best_id = id;
          }
        }
      }
      if (leave < 0) return LpStatus::optimal;

      const bool seed = basis_[static_cast<std::size_t>(leave)] < 0;
      const double sigma = seed && lambda(leave) > 0.0 ? -1.0 : 1.0;
      d = sigma * binv_.col(leave);
      ad.noalias() = lp_.rows * d;

      // Harris ratio test: first the largest step that keeps every
      // constraint within `harris` of feasibility, then among the blocking
      // constraints up to that step the one with the largest rate.
      const double dscale = std::max(1.0, d.cwiseAbs().maxCoeff());
      const double pivot_tol = opt_.pivot_tolerance * dscale;
      const auto for_each_blocking = [&](auto&& f) {
        for (Eigen::Index i = 0; i < m_; ++i)
          if (ad(i) < -pivot_tol && !in_basis_[static_cast<std::size_t>(i)]) f(i, ad(i), slack_(i));
        for (Eigen::Index j = 0; j < n_; ++j) {
          const long lo = m_ + j;
          const long hi = m_ + n_ + j;
          if (d(j) < -pivot_tol && !in_basis_[static_cast<std::size_t>(lo)] && std::isfinite(lp_.lower(j)))
            f(lo, d(j), slack_(lo));
          if (-d(j) < -pivot_tol && !in_basis_[static_cast<std::size_t>(hi)] && std::isfinite(lp_.upper(j)))
            f(hi, -d(j), slack_(hi));
        }
      };
      double bound = kInf;
      for_each_blocking([&](long, double rate, double slack) {
        bound = std::min(bound, (std::max(0.0, slack) + harris) / -rate);
      });
      if (!std::isfinite(bound)) return LpStatus::unbounded;

      long enter = -1;
      double enter_rate = 0.0;
      double step = 0.0;
      for_each_blocking([&](long id, double rate, double slack) {
        const double ratio = std::max(0.0, slack) / -rate;
        if (ratio > bound) return;
        const bool take = enter < 0 || (bland ? id < enter : rate < enter_rate);
        if (take) {
          enter = id;
          enter_rate = rate;
          step = ratio;
        }
      });

      x_ += step * d;
      slack_.head(m_) += step * ad;
      slack_.segment(m_, n_) += step * d;
      slack_.tail(n_) -= step * d;
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;
      if (degenerate_run > opt_.degenerate_limit) bland = true;

      // Rank-one update of the basis inverse for row `leave` -> `enter`.
      const Eigen::VectorXd col = binv_.col(leave);
      Eigen::RowVectorXd w = normal_times_binv(enter);
      const double pivot = w(leave);
      if (!(std::abs(pivot) > 1e-14)) throw Error("simplex pivot breakdown");
      w(leave) -= 1.0;
      binv_.noalias() -= (col / pivot) * w;

      const long old = basis_[static_cast<std::size_t>(leave)];
      if (old >= 0) in_basis_[static_cast<std::size_t>(old)] = 0;
      basis_[static_cast<std::size_t>(leave)] = enter;
      in_basis_[static_cast<std::size_t>(enter)] = 1;
      ++since_refactor;
      if (!binv_.allFinite() || !x_.allFinite()) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  // Drops the perturbation and moves x to the exact vertex of the current
  // basis. Returns the largest resulting constraint violation.
  double finish() {
    shift_.setZero();
    refactor();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < slack_.size(); ++i)
      if (std::isfinite(slack_(i))) worst = std::max(worst, -slack_(i));
    return worst;
  }

  const Eigen::VectorXd& x() const { return x_; }
  long iterations() const { return iterations_; }

 private:
  Eigen::RowVectorXd normal_times_binv(long id) const {
    if (id < 0) return binv_.row(-1 - id);
    if (id < m_) {
      Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(n_);
      for (RowMatrix::InnerIterator it(lp_.rows, id); it; ++it) w += it.value() * binv_.row(it.col());
      return w;
    }
    if (id < m_ + n_) return binv_.row(id - m_);
    return -binv_.row(id - m_ - n_);
  }

  // Right-hand side of constraint `id` written as a'x >= rhs, relaxed by
  // the perturbation.
  double rhs(long id) const {
    if (id < 0) return anchor_(-1 - id);
    if (id < m_) return lp_.rhs(id) - shift_(id);
    if (id < m_ + n_) return lp_.lower(id - m_) - shift_(id);
    return -lp_.upper(id - m_ - n_) - shift_(id);
  }

  void update_slacks() {
    slack_.resize(m_ + 2 * n_);
    slack_.head(m_) = lp_.rows * x_ - lp_.rhs + shift_.head(m_);
    slack_.segment(m_, n_) = x_ - lp_.lower + shift_.segment(m_, n_);
    slack_.tail(n_) = lp_.upper - x_ + shift_.tail(n_);
  }

  void refactor() {
    Eigen::MatrixXd basis_rows = Eigen::MatrixXd::Zero(n_, n_);
    Eigen::VectorXd b(n_);
    for (Eigen::Index r = 0; r < n_; ++r) {
      const long id = basis_[static_cast<std::size_t>(r)];
      b(r) = rhs(id);
      if (id < 0) {
        basis_rows(r, -1 - id) = 1.0;
      } else if (id < m_) {
        for (RowMatrix::InnerIterator it(lp_.rows, id); it; ++it) basis_rows(r, it.col()) = it.value();
      } else if (id < m_ + n_) {
        basis_rows(r, id - m_) = 1.0;
      } else {
        basis_rows(r, id - m_ - n_) = -1.0;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_rows);
    binv_ = lu.inverse();
    if (!binv_.allFinite()) throw Error("simplex basis became singular");
    x_ = binv_ * b;
    update_slacks();
  }

  const LinearProgram& lp_;
  const SimplexOptions& opt_;
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::VectorXd shift_;
  Eigen::VectorXd x_;
  Eigen::VectorXd anchor_;
  Eigen::VectorXd slack_;
  Eigen::MatrixXd binv_;
  std::vector<long> basis_;
  std::vector<char> in_basis_;
  long iterations_ = 0;
};

double max_row_violation(const LinearProgram& lp, const Eigen::VectorXd& x) {
  if (lp.rows.rows() == 0) return 0.0;
  return std::max(0.0, (lp.rhs - lp.rows * x).maxCoeff());
}

// Phase 1 (if needed) then phase 2 from `start`, which must lie in the box.
SimplexResult solve_from(const LinearProgram& lp, const SimplexOptions& options, Eigen::VectorXd start,
                         double perturbation) {
  const Eigen::Index n = lp.rows.cols();
  const Eigen::Index m = lp.rows.rows();
  SimplexResult result;
  result.status = LpStatus::infeasible;

  const double violation = max_row_violation(lp, start);
  if (violation > options.feasibility_tolerance) {
    // Phase 1: one extra variable t relaxes every row; minimise it.
    LinearProgram relaxed;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(lp.rows.nonZeros() + m));
    for (Eigen::Index i = 0; i < m; ++i) {
      for (RowMatrix::InnerIterator it(lp.rows, i); it; ++it) triplets.emplace_back(i, it.col(), it.value());
      triplets.emplace_back(i, n, 1.0);
    }
    relaxed.rows.resize(m, n + 1);
    relaxed.rows.setFromTriplets(triplets.begin(), triplets.end());
    relaxed.rhs = lp.rhs;
    relaxed.objective = Eigen::VectorXd::Zero(n + 1);
    relaxed.objective(n) = -1.0;
    relaxed.lower.resize(n + 1);
    relaxed.upper.resize(n + 1);
    relaxed.lower << lp.lower, 0.0;
    relaxed.upper << lp.upper, kInf;

    Eigen::VectorXd relaxed_start(n + 1);
    relaxed_start << start, violation;
    ActiveSetSimplex phase1(relaxed, options, perturbation);
    const LpStatus s1 = phase1.run(relaxed_start);
    result.iterations = phase1.iterations();
    phase1.finish();
    if (s1 != LpStatus::optimal || phase1.x()(n) > options.feasibility_tolerance) return result;
    start = phase1.x().head(n).cwiseMax(lp.lower).cwiseMin(lp.upper);
  }

  ActiveSetSimplex phase2(lp, options, perturbation);
  result.status = phase2.run(start);
  result.iterations += phase2.iterations();
  if (result.status != LpStatus::optimal) return result;
  result.x = phase2.x();
  const double worst = phase2.finish();
  // The exact vertex of the final basis is preferred; if dropping the
  // perturbation made it infeasible, keep the perturbed point instead.
  if (worst <= options.feasibility_tolerance) result.x = phase2.x();
  result.objective = lp.objective.dot(result.x);
  return result;
}

}  // namespace

SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options) {
  const Eigen::Index n = lp.rows.cols();
  const Eigen::Index m = lp.rows.rows();
  if (lp.objective.size() != n || lp.lower.size() != n || lp.upper.size() != n || lp.rhs.size() != m)
    throw std::invalid_argument("linear program dimensions disagree");

  SimplexResult infeasible;
  infeasible.status = LpStatus::infeasible;
  if ((lp.lower.array() > lp.upper.array()).any()) return infeasible;

  const Eigen::VectorXd start = Eigen::VectorXd::Zero(n).cwiseMax(lp.lower).cwiseMin(lp.upper);
  return solve_from(lp, options, start, options.perturbation);
}

}  // namespace flexlp
