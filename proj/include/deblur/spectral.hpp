#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deblur/forward.hpp"
#include "deblur/image.hpp"
#include "deblur/laplacian.hpp"
#include "deblur/psf.hpp"

namespace deblur {

// DFT diagonalization of the periodic deblurring problem. With the
// unnormalized-forward/1-over-n-inverse convention,
//   f(lambda) = sum_i w_i * lambda Z_i / (1 + lambda Z_i),
//   g(lambda) = a + sum_i log(1 + lambda Z_i),
// where Z_i = Lhat_i / |Ahat_i|^2, w_i = |yhat_i|^2 / n and
// a = sum_i log |Ahat_i|^2. Z is kept sorted ascending with the sorting
// permutation retained so per-mode quantities stay addressable.
//
// Modes with |Ahat_i| <= 1e-12 * max|Ahat| are flagged: g refuses to
// evaluate (the log-determinant is infinite), while f uses the limit
// contribution w_i (lambda Z_i -> infinity) for lambda > 0.
struct SpectralCache {
  int n = 0;
  int width = 0, height = 0;
  cvec ahat;                  // original mode order
  std::vector<double> lhat;   // original mode order
  cvec yhat;                  // original mode order
  std::vector<double> z;      // sorted ascending, flagged modes excluded
  std::vector<double> w;      // aligned with z
  std::vector<int> perm;      // z[k] came from original mode perm[k]
  double ydoty = 0.0;         // y^T y
  double a = 0.0;             // sum over unflagged modes of log|Ahat_i|^2
  std::vector<int> flagged;   // original indices of near-zero |Ahat| modes
  std::vector<double> flagged_w;
  int zero_count = 0;         // leading entries of z that are exactly <= tiny

  bool has_flagged() const { return !flagged.empty(); }
};

SpectralCache build_spectral_cache(const Psf& psf, const ImageGrid& y);

// Cumulative-sum tables for the truncated head/tail expansions of f and g.
// Rows r, columns q with sentinel columns so that empty head (q = 0) and
// empty tail (q = n+1) index cleanly:
//   S[r][q] = sum_{j<=q} w_j Z_j^r            (r = 1..s)
//   T[r][q] = sum_{j>=q} w_j Z_j^{-r}         (r = 0..s)
//   U[r][q] = sum_{j<=q} Z_j^r                (r = 1..s)
//   V[r][q] = sum_{j>=q} Z_j^{-r}             (r = 1..s)
//   b[q]    = sum_{j>=q} log Z_j
// Suffix columns at or before a zero mode hold NaN; they are unreachable
// because lambda Z > 1/c forces Z > 0.
struct CumulantTables {
  int s = 0;
  int n = 0;  // number of (unflagged) modes, matches cache.z.size()
  std::vector<std::vector<double>> S, T, U, V;
  std::vector<double> b;
};

CumulantTables build_cumulant_tables(const SpectralCache& cache, int s = 8);

// Per-call instrumentation for the truncated evaluations.
struct FastEvalStats {
  int head_terms = 0;
  int middle_terms = 0;
  int tail_terms = 0;
};

// Direct O(n) evaluations.
double f_direct(const SpectralCache& cache, double lambda);
double g_direct(const SpectralCache& cache, double lambda);

// Truncated evaluations with certified absolute error <= eps:
// c_f solves c^{s+1} ||y||^2 = eps, c_g solves c^{s+1} n = eps. Modes with
// lambda Z inside [c, 1/c] are summed exactly; the head is replaced by the
// alternating power series over S (or U), the tail by the series over T
// (or V). Ties lambda Z = c go to the exact middle band.
double f_fast(const SpectralCache& cache, const CumulantTables& tables,
              double lambda, double eps, FastEvalStats* stats = nullptr);
double g_fast(const SpectralCache& cache, const CumulantTables& tables,
              double lambda, double eps, FastEvalStats* stats = nullptr);

// Versioned little-endian binary dump so repeated CLI runs skip the build.
void save_spectral_cache(const SpectralCache& cache, const std::string& path);
SpectralCache load_spectral_cache(const std::string& path);

}  // namespace deblur
