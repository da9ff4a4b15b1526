#include "deblur/psf.hpp"

#include <cmath>

namespace deblur {

void Psf::check() const {
  grid.check();
  double sum = 0.0;
  for (double v : grid.values) {
    if (v < 0.0) throw DomainError("Psf entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw DomainError("Psf entries must sum to 1 within 1e-12");
  if (anchor_row < 0 || anchor_row >= grid.height || anchor_col < 0 ||
      anchor_col >= grid.width)
    throw DomainError("Psf anchor outside kernel grid");
}

Psf Psf::delta() {
  Psf p;
  p.grid = ImageGrid(1, 1, 1.0);
  return p;
}

Psf Psf::gaussian(double sigma, int radius) {
  if (sigma <= 0.0 || radius < 0) throw DomainError("gaussian psf: bad parameters");
  const int side = 2 * radius + 1;
  Psf p;
  p.grid = ImageGrid(side, side);
  p.anchor_row = p.anchor_col = radius;
  double sum = 0.0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const double dr = r - radius, dc = c - radius;
      const double v = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
      p.grid.at(r, c) = v;
      sum += v;
    }
  for (auto& v : p.grid.values) v /= sum;
  return p;
}

Psf Psf::disk(int radius) {
  if (radius < 0) throw DomainError("disk psf: bad radius");
  const int side = 2 * radius + 1;
  Psf p;
  p.grid = ImageGrid(side, side);
  p.anchor_row = p.anchor_col = radius;
  double sum = 0.0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) {
      const double dr = r - radius, dc = c - radius;
      if (dr * dr + dc * dc <= static_cast<double>(radius) * radius + 1e-9) {
        p.grid.at(r, c) = 1.0;
        sum += 1.0;
      }
    }
  for (auto& v : p.grid.values) v /= sum;
  return p;
}

Psf extract_psf(const ImageGrid& data, int row, int col, int h, int w,
                int anchor_row, int anchor_col) {
  if (h <= 0 || w <= 0 || row < 0 || col < 0 || row + h > data.height ||
      col + w > data.width)
    throw DomainError("extract_psf: region outside data bounds");
  Psf p;
  p.grid = ImageGrid(w, h);
  double sum = 0.0;
  double best = -1.0;
  int best_r = 0, best_c = 0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double v = data.at(row + r, col + c);
      if (v < 0.0) v = 0.0;  // physical nonnegativity
      p.grid.at(r, c) = v;
      sum += v;
      if (v > best) {
        best = v;
        best_r = r;
        best_c = c;
      }
    }
  if (sum <= 0.0) throw DegeneratePsfError("extract_psf: region sums to zero");
  for (auto& v : p.grid.values) v /= sum;
  p.anchor_row = (anchor_row >= 0) ? anchor_row : best_r;
  p.anchor_col = (anchor_col >= 0) ? anchor_col : best_c;
  p.check();
  return p;
}

}  // namespace deblur
