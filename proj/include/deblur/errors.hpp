#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace deblur {

// Shape mismatch between an operator and its argument.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter outside its documented range (negative lambda, delta <= 0, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Extracted PSF region sums to zero after clamping.
class DegeneratePsfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear system is singular (lambda = 0 with spectral zeros, etc.).
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation requested on a cache with flagged spectral zeros.
class SpectralZeroError : public std::runtime_error {
 public:
  SpectralZeroError(const std::string& what, std::vector<int> modes)
      : std::runtime_error(what), flagged_modes(std::move(modes)) {}
  std::vector<int> flagged_modes;
};

// Iterative solver exhausted max_iters; carries the best iterate found.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best,
                   double residual, int iters)
      : std::runtime_error(what),
        best_iterate(std::move(best)),
        residual_norm(residual),
        iterations(iters) {}
  std::vector<double> best_iterate;
  double residual_norm;
  int iterations;
};

// Sampler requires a conjugate Gamma hyperprior but got a general one.
class UnsupportedPriorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// L-curve is collinear; no curvature maximum exists.
class NoCornerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Constant series has no autocorrelation structure.
class DegenerateSeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deblur
