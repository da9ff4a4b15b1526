#pragma once

#include <vector>

#include "deblur/forward.hpp"
#include "deblur/krylov.hpp"
#include "deblur/laplacian.hpp"

namespace deblur {

// L-curve data over a lambda grid: residual norms ||A xhat - y|| and
// seminorms sqrt(xhat^T L xhat), plus the detected corner.
struct LCurve {
  std::vector<double> lambdas;
  std::vector<double> residual_norms;
  std::vector<double> seminorms;
  int corner_index = 0;
};

// Solves (A^T A + lambda L) xhat = A^T y. The periodic variant solves
// diagonally in the transform domain; the zero-padded variant runs the
// matrix-free Krylov solver. lambda = 0 requires an invertible A^T A
// (periodic with no spectral zeros).
ImageGrid solve_gendeconv(const ForwardModel& model, const LaplacianOp& laplacian,
                          double lambda, const ImageGrid& y,
                          const IterativeSolverConfig& config = {});

LCurve build_lcurve(const ForwardModel& model, const LaplacianOp& laplacian,
                    const ImageGrid& y, const std::vector<double>& lambda_grid,
                    const IterativeSolverConfig& config = {});

// Scale-matched default grid: K log-spaced points on
// [1e-8, 1e2] * ||A^T A||_1 / ||L||_1 (representative-column estimate).
std::vector<double> default_lambda_grid(const ForwardModel& model,
                                        const LaplacianOp& laplacian, int K = 200);

// Corner = discrete maximum of signed Menger curvature over consecutive
// log-log triples, after monotone cleanup. Throws NoCornerError when the
// cleaned curve is collinear.
std::pair<double, int> lcurve_corner(const LCurve& curve);

}  // namespace deblur
