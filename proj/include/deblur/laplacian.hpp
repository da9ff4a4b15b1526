#pragma once

#include <vector>

#include "deblur/image.hpp"
#include "deblur/rng.hpp"

namespace deblur {

enum class LaplacianBoundary { Periodic, DirichletZero };

// Graph Laplacian of the 4-neighbor pixel lattice: diagonal 4, -1 on each
// neighbor pair; equivalently convolution with the 5-point stencil. Under
// DirichletZero the missing neighbors beyond the border are treated as
// fixed zeros, so the diagonal stays 4 and L is positive definite; under
// Periodic the constant vector is a null vector.
//
// The operator carries its edge decomposition L = D^T D, one row of D per
// edge: interior edges contribute (+1 at i, -1 at j), Dirichlet half-edges
// (a border pixel next to an out-of-domain zero) contribute (+1 at i).
// This is what makes the O(n) assembly-by-cliques prior sampler possible.
class LaplacianOp {
 public:
  struct Edge {
    int i;
    int j;  // -1 for a Dirichlet half-edge
  };

  LaplacianOp(int width, int height, LaplacianBoundary boundary);

  // Arbitrary incidence structure (used by tests and non-lattice graphs);
  // apply() then sums D^T D over the edge list.
  static LaplacianOp from_edges(int n, std::vector<Edge> edges);

  int width() const { return width_; }
  int height() const { return height_; }
  int n() const { return n_; }
  LaplacianBoundary boundary() const { return boundary_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool is_lattice() const { return lattice_; }

  ImageGrid apply(const ImageGrid& x) const;

  // x^T L x computed as |D x|^2 (nonnegative by construction).
  double quadratic_form(const ImageGrid& x) const;

 private:
  LaplacianOp() = default;
  int width_ = 0, height_ = 0, n_ = 0;
  LaplacianBoundary boundary_ = LaplacianBoundary::Periodic;
  bool lattice_ = true;
  std::vector<Edge> edges_;
};

inline ImageGrid apply_laplacian(const LaplacianOp& op, const ImageGrid& x) {
  return op.apply(x);
}

// Spectrum of the periodic 5-point stencil on a width x height grid:
// Lhat(r,c) = 4 - 2 cos(2 pi r / height) - 2 cos(2 pi c / width), row-major.
std::vector<double> laplacian_spectrum(int width, int height);

// Draw v2 ~ N(0, delta * L) as sqrt(delta) * D^T eta with one standard
// normal per edge. O(n).
ImageGrid sample_prior_noise(const LaplacianOp& op, double delta, RngStream& rng);

}  // namespace deblur
