#pragma once

#include "deblur/image.hpp"

namespace deblur {

// Point-spread function: a small nonnegative kernel summing to one, with an
// anchor marking the kernel origin. A delta PSF (single 1 at the anchor)
// makes the forward map the identity.
struct Psf {
  ImageGrid grid;
  int anchor_row = 0;
  int anchor_col = 0;

  // Throws if entries are negative, the sum deviates from 1 by more than
  // 1e-12, or the anchor is out of bounds.
  void check() const;

  static Psf delta();

  // Normalized truncated Gaussian of the given radius (grid side 2r+1),
  // anchored at the center.
  static Psf gaussian(double sigma, int radius);

  // Uniform disk of the given radius, anchored at the center.
  static Psf disk(int radius);
};

// Crops region (row, col, h, w) out of the data, clamps negatives to zero,
// normalizes to sum one. The anchor defaults to the brightest pixel of the
// region (the paper leaves the kernel origin unspecified); pass
// anchor_row/col >= 0 to override.
Psf extract_psf(const ImageGrid& data, int row, int col, int h, int w,
                int anchor_row = -1, int anchor_col = -1);

}  // namespace deblur
