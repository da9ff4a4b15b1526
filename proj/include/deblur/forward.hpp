#pragma once

#include "deblur/fft.hpp"
#include "deblur/image.hpp"
#include "deblur/psf.hpp"

namespace deblur {

enum class BoundaryVariant {
  PeriodicSpectral,     // circular convolution, diagonalized by the 2-D DFT
  ZeroPaddedDirichlet,  // latent field has a border; observation crops it
};

// Linear forward operator y = A x (convolution with the PSF) together with
// its exact adjoint. The periodic variant acts on p x p images and applies
// in the transform domain; the zero-padded variant maps a (p+2b) x (p+2b)
// latent image to a p x p observation by direct convolution, treating
// pixels beyond the latent border as fixed zeros.
class ForwardModel {
 public:
  static ForwardModel periodic(const Psf& psf, int p);
  static ForwardModel zero_padded(const Psf& psf, int p, int border);

  BoundaryVariant variant() const { return variant_; }
  const Psf& psf() const { return psf_; }
  int observed_size() const { return p_; }                  // p
  int latent_size() const { return p_ + 2 * border_; }       // p + 2b
  int border() const { return border_; }
  int m() const { return p_ * p_; }
  int n() const { return latent_size() * latent_size(); }

  // Spectrum of A on the p x p grid (periodic variant only).
  const cvec& spectrum() const;

  ImageGrid apply_forward(const ImageGrid& x) const;
  ImageGrid apply_adjoint(const ImageGrid& y) const;

 private:
  ForwardModel() = default;

  BoundaryVariant variant_ = BoundaryVariant::PeriodicSpectral;
  Psf psf_;
  int p_ = 0;
  int border_ = 0;
  cvec ahat_;  // periodic only
};

inline ImageGrid apply_forward(const ForwardModel& model, const ImageGrid& x) {
  return model.apply_forward(x);
}
inline ImageGrid apply_adjoint(const ForwardModel& model, const ImageGrid& y) {
  return model.apply_adjoint(y);
}

}  // namespace deblur
