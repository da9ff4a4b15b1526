#pragma once

#include <string>
#include <vector>

#include "deblur/errors.hpp"

namespace deblur {

// A rectangular grid of real pixel values, row-major. Used for both the
// latent field x and the data y. Values are kept as doubles throughout;
// 8-bit input is widened on load and never re-quantized internally.
struct ImageGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // size width*height, row-major

  ImageGrid() = default;
  ImageGrid(int w, int h, double fill = 0.0);
  ImageGrid(int w, int h, std::vector<double> vals);

  int size() const { return width * height; }
  double& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
  double at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }

  bool same_shape(const ImageGrid& other) const {
    return width == other.width && height == other.height;
  }

  // Throws DimensionError / DomainError if the invariants fail.
  void check() const;
};

double dot(const ImageGrid& a, const ImageGrid& b);
double norm2(const ImageGrid& a);  // Euclidean norm

// Binary PGM (P5, 8 bit). Writing clamps and rounds to [0, 255]; use the
// raw format for lossless round trips.
ImageGrid read_pgm(const std::string& path);
void write_pgm(const ImageGrid& img, const std::string& path);

// Raw grid file: header = two uint32 little-endian (width, height),
// followed by width*height float64 little-endian values, row-major.
ImageGrid read_raw(const std::string& path);
void write_raw(const ImageGrid& img, const std::string& path);

}  // namespace deblur
