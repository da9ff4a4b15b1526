#include "deblur/laplacian.hpp"

#include <cmath>

namespace deblur {

LaplacianOp::LaplacianOp(int width, int height, LaplacianBoundary boundary)
    : width_(width), height_(height), n_(width * height), boundary_(boundary) {
  if (width <= 0 || height <= 0)
    throw DomainError("LaplacianOp: dimensions must be positive");
  if (boundary == LaplacianBoundary::Periodic && (width < 2 || height < 2))
    throw DomainError("LaplacianOp: periodic lattice needs both sides >= 2");
  edges_.reserve(static_cast<size_t>(2) * n_);
  auto idx = [this](int r, int c) { return r * width_ + c; };
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const int i = idx(r, c);
      if (boundary == LaplacianBoundary::Periodic) {
        // One right + one down edge per pixel covers the torus; on a side
        // of length 2 the wrap duplicates the pair, matching the stencil's
        // neighbor multiplicity.
        edges_.push_back({i, idx(r, (c + 1) % width)});
        edges_.push_back({i, idx((r + 1) % height, c)});
      } else {
        if (c + 1 < width) edges_.push_back({i, idx(r, c + 1)});
        else edges_.push_back({i, -1});
        if (c == 0) edges_.push_back({i, -1});
        if (r + 1 < height) edges_.push_back({i, idx(r + 1, c)});
        else edges_.push_back({i, -1});
        if (r == 0) edges_.push_back({i, -1});
      }
    }
}

LaplacianOp LaplacianOp::from_edges(int n, std::vector<Edge> edges) {
  LaplacianOp op;
  op.n_ = n;
  op.width_ = n;
  op.height_ = 1;
  op.lattice_ = false;
  op.edges_ = std::move(edges);
  for (const auto& e : op.edges_)
    if (e.i < 0 || e.i >= n || e.j < -1 || e.j >= n)
      throw DomainError("LaplacianOp::from_edges: edge index out of range");
  return op;
}

ImageGrid LaplacianOp::apply(const ImageGrid& x) const {
  if (x.size() != n_ || (lattice_ && (x.width != width_ || x.height != height_)))
    throw DimensionError("apply_laplacian: shape mismatch");
  if (lattice_) {
    // 5-point stencil with the boundary rule; faster than the edge sum.
    ImageGrid out(x.width, x.height, 0.0);
    const int w = width_, h = height_;
    const bool periodic = boundary_ == LaplacianBoundary::Periodic;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double s = 4.0 * x.at(r, c);
        if (periodic) {
          s -= x.at((r + 1) % h, c) + x.at((r - 1 + h) % h, c) +
               x.at(r, (c + 1) % w) + x.at(r, (c - 1 + w) % w);
        } else {
          if (r + 1 < h) s -= x.at(r + 1, c);
          if (r > 0) s -= x.at(r - 1, c);
          if (c + 1 < w) s -= x.at(r, c + 1);
          if (c > 0) s -= x.at(r, c - 1);
        }
        out.at(r, c) = s;
      }
    return out;
  }
  ImageGrid out(x.width, x.height, 0.0);
  for (const auto& e : edges_) {
    const double d = x.values[e.i] - (e.j >= 0 ? x.values[e.j] : 0.0);
    out.values[e.i] += d;
    if (e.j >= 0) out.values[e.j] -= d;
  }
  return out;
}

double LaplacianOp::quadratic_form(const ImageGrid& x) const {
  if (x.size() != n_) throw DimensionError("quadratic_form: shape mismatch");
  double s = 0.0;
  for (const auto& e : edges_) {
    const double d = x.values[e.i] - (e.j >= 0 ? x.values[e.j] : 0.0);
    s += d * d;
  }
  return s;
}

std::vector<double> laplacian_spectrum(int width, int height) {
  std::vector<double> lhat(static_cast<size_t>(width) * height);
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      lhat[static_cast<size_t>(r) * width + c] =
          4.0 - 2.0 * std::cos(two_pi * r / height) - 2.0 * std::cos(two_pi * c / width);
  return lhat;
}

ImageGrid sample_prior_noise(const LaplacianOp& op, double delta, RngStream& rng) {
  if (delta <= 0.0) throw DomainError("sample_prior_noise: delta must be positive");
  ImageGrid v(op.width(), op.height(), 0.0);
  const double scale = std::sqrt(delta);
  for (const auto& e : op.edges()) {
    const double eta = scale * rng.normal();
    v.values[e.i] += eta;
    if (e.j >= 0) v.values[e.j] -= eta;
  }
  return v;
}

}  // namespace deblur
