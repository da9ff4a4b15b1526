#pragma once

#include <complex>
#include <vector>

#include "deblur/image.hpp"

namespace deblur {

using cvec = std::vector<std::complex<double>>;

// 2-D DFT convention used throughout: unnormalized forward transform,
// 1/n on the inverse. Parseval then reads sum |xhat|^2 = n * sum |x|^2.
// Plans are cached per shape; FFTW_ESTIMATE keeps planning deterministic.
cvec dft2(const ImageGrid& img);
cvec dft2(const cvec& data, int width, int height, bool inverse);

// Inverse transform of a spectrum back to a real image (imaginary parts,
// which are roundoff for conjugate-symmetric spectra, are dropped).
ImageGrid idft2_real(const cvec& spectrum, int width, int height);

}  // namespace deblur
