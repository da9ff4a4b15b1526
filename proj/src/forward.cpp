#include "deblur/forward.hpp"

namespace deblur {

ForwardModel ForwardModel::periodic(const Psf& psf, int p) {
  psf.check();
  if (p <= 0) throw DomainError("ForwardModel: p must be positive");
  if (psf.grid.width > p || psf.grid.height > p)
    throw DomainError("ForwardModel: PSF larger than image");
  ForwardModel m;
  m.variant_ = BoundaryVariant::PeriodicSpectral;
  m.psf_ = psf;
  m.p_ = p;
  // Embed the kernel with its anchor at index (0,0), wrapping negatives.
  ImageGrid embedded(p, p, 0.0);
  for (int r = 0; r < psf.grid.height; ++r)
    for (int c = 0; c < psf.grid.width; ++c) {
      const int rr = ((r - psf.anchor_row) % p + p) % p;
      const int cc = ((c - psf.anchor_col) % p + p) % p;
      embedded.at(rr, cc) += psf.grid.at(r, c);
    }
  m.ahat_ = dft2(embedded);
  return m;
}

ForwardModel ForwardModel::zero_padded(const Psf& psf, int p, int border) {
  psf.check();
  if (p <= 0 || border < 0) throw DomainError("ForwardModel: bad shape parameters");
  ForwardModel m;
  m.variant_ = BoundaryVariant::ZeroPaddedDirichlet;
  m.psf_ = psf;
  m.p_ = p;
  m.border_ = border;
  return m;
}

const cvec& ForwardModel::spectrum() const {
  if (variant_ != BoundaryVariant::PeriodicSpectral)
    throw DomainError("spectrum() is only defined for the periodic variant");
  return ahat_;
}

ImageGrid ForwardModel::apply_forward(const ImageGrid& x) const {
  if (variant_ == BoundaryVariant::PeriodicSpectral) {
    if (x.width != p_ || x.height != p_)
      throw DimensionError("apply_forward: image shape does not match model");
    cvec xhat = dft2(x);
    for (size_t i = 0; i < xhat.size(); ++i) xhat[i] *= ahat_[i];
    return idft2_real(xhat, p_, p_);
  }
  const int q = latent_size();
  if (x.width != q || x.height != q)
    throw DimensionError("apply_forward: latent shape does not match model");
  // (Ax)(i,j) = sum_{u,v} k(u,v) x(i + b - u + ar, j + b - v + ac),
  // out-of-domain latent pixels fixed at zero. O(m * |k|).
  ImageGrid y(p_, p_, 0.0);
  const int ar = psf_.anchor_row, ac = psf_.anchor_col;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) {
      double s = 0.0;
      for (int u = 0; u < psf_.grid.height; ++u) {
        const int rr = i + border_ - u + ar;
        if (rr < 0 || rr >= q) continue;
        for (int v = 0; v < psf_.grid.width; ++v) {
          const int cc = j + border_ - v + ac;
          if (cc < 0 || cc >= q) continue;
          s += psf_.grid.at(u, v) * x.at(rr, cc);
        }
      }
      y.at(i, j) = s;
    }
  return y;
}

ImageGrid ForwardModel::apply_adjoint(const ImageGrid& y) const {
  if (y.width != p_ || y.height != p_)
    throw DimensionError("apply_adjoint: observed shape does not match model");
  if (variant_ == BoundaryVariant::PeriodicSpectral) {
    cvec yhat = dft2(y);
    for (size_t i = 0; i < yhat.size(); ++i) yhat[i] *= std::conj(ahat_[i]);
    return idft2_real(yhat, p_, p_);
  }
  const int q = latent_size();
  ImageGrid x(q, q, 0.0);
  const int ar = psf_.anchor_row, ac = psf_.anchor_col;
  // Transpose of the loop above: scatter each observation through the kernel.
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) {
      const double yij = y.at(i, j);
      for (int u = 0; u < psf_.grid.height; ++u) {
        const int rr = i + border_ - u + ar;
        if (rr < 0 || rr >= q) continue;
        for (int v = 0; v < psf_.grid.width; ++v) {
          const int cc = j + border_ - v + ac;
          if (cc < 0 || cc >= q) continue;
          x.at(rr, cc) += psf_.grid.at(u, v) * yij;
        }
      }
    }
  return x;
}

}  // namespace deblur
