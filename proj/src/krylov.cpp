#include "deblur/krylov.hpp"

#include <cmath>
#include <string>

namespace deblur {

namespace {

double nrm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

SolveResult iterative_solve(const LinearOperator& op, const std::vector<double>& rhs,
                            const IterativeSolverConfig& config,
                            const std::vector<double>* x0) {
  config.check();
  const int n = op.n;
  if (static_cast<int>(rhs.size()) != n)
    throw DimensionError("iterative_solve: rhs length does not match operator");
  for (double v : rhs)
    if (!std::isfinite(v)) throw DomainError("iterative_solve: rhs must be finite");

  const double rhs_norm = nrm2(rhs);
  std::vector<double> x = x0 ? *x0 : std::vector<double>(n, 0.0);
  if (rhs_norm == 0.0) return {std::vector<double>(n, 0.0), 0.0, 0};
  const double target = config.rel_tol * rhs_norm;

  const int m = config.restart;
  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  // Hessenberg stored column-wise: H[j] holds h(0..j+1, j).
  std::vector<std::vector<double>> H(m, std::vector<double>(m + 1, 0.0));
  std::vector<double> cs(m), sn(m), beta_e1(m + 1);

  int inner_iters = 0;  // Krylov steps; each costs one operator application
  double res_norm = 0.0;

  for (;;) {
    // True residual at the start of each cycle.
    std::vector<double> r(n);
    op.apply(x, r);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    res_norm = nrm2(r);
    if (res_norm <= target) return {x, res_norm, inner_iters};
    if (inner_iters >= config.max_iters)
      throw ConvergenceError("iterative_solve: max_iters exhausted (residual " +
                                 std::to_string(res_norm / rhs_norm) + " relative)",
                             x, res_norm, inner_iters);

    const double beta = res_norm;
    for (int i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(beta_e1.begin(), beta_e1.end(), 0.0);
    beta_e1[0] = beta;

    int k = 0;  // dimension of the Krylov basis built this cycle
    for (int j = 0; j < m; ++j) {
      std::vector<double>& wv = V[j + 1];
      op.apply(V[j], wv);
      ++inner_iters;
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i) {
        double h = 0.0;
        for (int t = 0; t < n; ++t) h += wv[t] * V[i][t];
        H[j][i] = h;
        for (int t = 0; t < n; ++t) wv[t] -= h * V[i][t];
      }
      const double hlast = nrm2(wv);
      H[j][j + 1] = hlast;
      if (hlast > 0.0)
        for (int t = 0; t < n; ++t) wv[t] /= hlast;

      // Apply previous Givens rotations to the new column.
      for (int i = 0; i < j; ++i) {
        const double tmp = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
        H[j][i + 1] = -sn[i] * H[j][i] + cs[i] * H[j][i + 1];
        H[j][i] = tmp;
      }
      // New rotation to eliminate H[j][j+1].
      const double denom = std::hypot(H[j][j], H[j][j + 1]);
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = H[j][j] / denom;
        sn[j] = H[j][j + 1] / denom;
      }
      H[j][j] = denom;
      H[j][j + 1] = 0.0;
      beta_e1[j + 1] = -sn[j] * beta_e1[j];
      beta_e1[j] = cs[j] * beta_e1[j];

      k = j + 1;
      const double est = std::abs(beta_e1[j + 1]);
      if (est <= 0.5 * target || hlast == 0.0 || inner_iters >= config.max_iters)
        break;
    }

    // Back substitution for the least-squares coefficients.
    std::vector<double> yk(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = beta_e1[i];
      for (int j2 = i + 1; j2 < k; ++j2) s -= H[j2][i] * yk[j2];
      yk[i] = (H[i][i] != 0.0) ? s / H[i][i] : 0.0;
    }
    for (int i = 0; i < k; ++i)
      for (int t = 0; t < n; ++t) x[t] += yk[i] * V[i][t];
  }
}

}  // namespace deblur
