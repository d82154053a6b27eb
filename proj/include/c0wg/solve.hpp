#pragma once

#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "c0wg/assemble.hpp"
#include "c0wg/errors.hpp"
#include "c0wg/space.hpp"

namespace c0wg {

enum class SolverKind { direct, cg };

inline SolverKind parse_solver(const std::string& s) {
  if (s == "direct") return SolverKind::direct;
  if (s == "cg") return SolverKind::cg;
  throw Error(ErrorKind::config, "unknown solver '" + s + "'");
}

inline std::string to_string(SolverKind s) { return s == SolverKind::direct ? "direct" : "cg"; }

struct SolverStats {
  SolverKind kind = SolverKind::direct;
  int iterations = 0;  // CG iterations, or refinement steps for direct
  double residual = 0.0;  // ||A x - b|| / ||b||
  double seconds = 0.0;
  long factor_nonzeros = 0;
};

struct Solution {
  FieldVector u;
  Eigen::VectorXd free_values;
  SolverStats stats;
};

inline constexpr int max_refinement_steps = 10;

namespace detail {

/// The extended-precision copy of a system, or the double one widened when
/// the system was built without it.
class ExtendedView {
 public:
  explicit ExtendedView(const SparseSystem& sys) {
    const Eigen::Index n = sys.n_free();
    if (sys.matrix_ext.rows() == n && sys.matrix_ext.cols() == n && sys.rhs_ext.size() == n) {
      a_ = &sys.matrix_ext;
      b_ = &sys.rhs_ext;
    } else {
      widened_matrix_ = sys.matrix.cast<Extended>();
      widened_rhs_ = sys.rhs.cast<Extended>();
      a_ = &widened_matrix_;
      b_ = &widened_rhs_;
    }
  }

  VectorExt residual(const VectorExt& x) const { return *b_ - *a_ * x; }

  double relative(const VectorExt& r) const {
    const Extended bn = b_->norm();
    return static_cast<double>(bn > 0 ? r.norm() / bn : r.norm());
  }

 private:
  SparseMatrixExt widened_matrix_;
  VectorExt widened_rhs_;
  const SparseMatrixExt* a_ = nullptr;
  const VectorExt* b_ = nullptr;
};

}  // namespace detail

/// Solve the reduced SPD system. `direct` factors the double matrix by sparse
/// Cholesky with AMD ordering, then refines with residuals computed from the
/// extended-precision system until they stop shrinking. `cg` is
/// Jacobi-preconditioned conjugate gradients capped at 20 sqrt(n) iterations.
/// The reported residual is ||A x - b|| / ||b|| evaluated in extended
/// precision. Constrained unknowns are re-inserted from the fixed values.
inline Solution solve_spd(const SparseSystem& sys, SolverKind kind = SolverKind::direct, double tol = 1e-10) {
  if (!(tol > 0.0)) throw Error(ErrorKind::config, "solver tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();
  const int n = sys.n_free();
  Solution sol;
  sol.stats.kind = kind;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  if (n > 0) {
    const detail::ExtendedView ext(sys);
    if (kind == SolverKind::direct) {
      Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> chol(sys.matrix);
      if (chol.info() != Eigen::Success) {
        throw Error(ErrorKind::not_spd, "sparse Cholesky factorisation broke down");
      }
      sol.stats.factor_nonzeros = static_cast<long>(chol.matrixL().nestedExpression().nonZeros());
      VectorExt xe = chol.solve(sys.rhs).cast<Extended>();
      VectorExt r = ext.residual(xe);
      double res = ext.relative(r);
      for (int step = 0; step < max_refinement_steps && res > 0.0; ++step) {
        const VectorExt trial = xe + chol.solve(r.cast<double>()).cast<Extended>();
        const VectorExt r_trial = ext.residual(trial);
        const double res_trial = ext.relative(r_trial);
        if (!(res_trial < res)) break;
        const bool stalled = res_trial > res / 2;
        xe = trial;
        r = r_trial;
        res = res_trial;
        sol.stats.iterations = step + 1;
        if (stalled) break;
      }
      x = xe.cast<double>();
    } else if (sys.rhs.norm() > 0.0) {
      Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
      cg.setTolerance(tol);
      cg.setMaxIterations(static_cast<int>(std::ceil(20.0 * std::sqrt(static_cast<double>(n)))));
      cg.compute(sys.matrix);
      x = cg.solve(sys.rhs);
      sol.stats.iterations = static_cast<int>(cg.iterations());
      if (cg.info() != Eigen::Success) {
        throw Error(ErrorKind::convergence, "CG did not reach tolerance in " + std::to_string(cg.iterations()) +
                                                " iterations (estimated residual " +
                                                std::to_string(cg.error()) + ")");
      }
    }
    sol.stats.residual = ext.relative(ext.residual(x.cast<Extended>()));
  }

  sol.free_values = x;
  sol.u.values = sys.fixed_values;
  for (int i = 0; i < n; ++i) sol.u.values(sys.free_to_global[i]) = x(i);
  sol.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace c0wg
