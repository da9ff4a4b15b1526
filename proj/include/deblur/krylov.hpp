#pragma once

#include <functional>
#include <vector>

#include "deblur/errors.hpp"

namespace deblur {

// Matrix-free operator on flat vectors.
struct LinearOperator {
  int n = 0;
  std::function<void(const std::vector<double>& in, std::vector<double>& out)> apply;

  std::vector<double> operator()(const std::vector<double>& in) const {
    std::vector<double> out(n);
    apply(in, out);
    return out;
  }
};

struct IterativeSolverConfig {
  int restart = 25;       // Krylov cycle length
  double rel_tol = 1e-3;  // target ||op(x) - rhs|| <= rel_tol * ||rhs||
  int max_iters = 10000;  // total matrix applications allowed

  void check() const {
    if (restart < 1) throw DomainError("IterativeSolverConfig: restart must be >= 1");
    if (!(rel_tol > 0.0 && rel_tol < 1.0))
      throw DomainError("IterativeSolverConfig: rel_tol must lie in (0, 1)");
    if (max_iters < 1) throw DomainError("IterativeSolverConfig: max_iters must be >= 1");
  }
};

struct SolveResult {
  std::vector<double> solution;
  double residual_norm = 0.0;  // absolute euclidean norm of rhs - op(x)
  int iterations = 0;          // matrix applications consumed
};

// Restarted GMRES. Deterministic given inputs; throws ConvergenceError
// (carrying the best iterate) when max_iters is exhausted before the
// relative residual target is met.
SolveResult iterative_solve(const LinearOperator& op, const std::vector<double>& rhs,
                            const IterativeSolverConfig& config,
                            const std::vector<double>* x0 = nullptr);

}  // namespace deblur
