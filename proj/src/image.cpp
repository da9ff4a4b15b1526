#include "deblur/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace deblur {

ImageGrid::ImageGrid(int w, int h, double fill)
    : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {
  if (w <= 0 || h <= 0) throw DomainError("ImageGrid dimensions must be positive");
}

ImageGrid::ImageGrid(int w, int h, std::vector<double> vals)
    : width(w), height(h), values(std::move(vals)) {
  if (w <= 0 || h <= 0) throw DomainError("ImageGrid dimensions must be positive");
  if (values.size() != static_cast<size_t>(w) * h)
    throw DimensionError("ImageGrid values length does not match width*height");
}

void ImageGrid::check() const {
  if (width <= 0 || height <= 0)
    throw DomainError("ImageGrid dimensions must be positive");
  if (values.size() != static_cast<size_t>(width) * height)
    throw DimensionError("ImageGrid values length does not match width*height");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("ImageGrid contains non-finite value");
}

double dot(const ImageGrid& a, const ImageGrid& b) {
  if (!a.same_shape(b)) throw DimensionError("dot: shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

double norm2(const ImageGrid& a) { return std::sqrt(dot(a, a)); }

ImageGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PGM file: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("not a binary PGM (P5) file: " + path);
  auto next_int = [&in, &path]() {
    // Skip whitespace and '#' comment lines between header tokens.
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = -1;
    in >> v;
    if (!in || v < 0) throw std::runtime_error("bad PGM header in " + path);
    return v;
  };
  const long w = next_int();
  const long h = next_int();
  const long maxval = next_int();
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error("PGM maxval out of 8-bit range in " + path);
  in.get();  // single whitespace after maxval
  ImageGrid img(static_cast<int>(w), static_cast<int>(h));
  std::vector<unsigned char> buf(img.values.size());
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw std::runtime_error("truncated PGM data in " + path);
  for (size_t i = 0; i < buf.size(); ++i) img.values[i] = static_cast<double>(buf[i]);
  return img;
}

void write_pgm(const ImageGrid& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> buf(img.values.size());
  for (size_t i = 0; i < buf.size(); ++i) {
    double v = std::round(img.values[i]);
    v = std::clamp(v, 0.0, 255.0);
    buf[i] = static_cast<unsigned char>(v);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

ImageGrid read_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open raw grid file: " + path);
  const std::uint32_t w = read_u32_le(in);
  const std::uint32_t h = read_u32_le(in);
  if (!in || w == 0 || h == 0) throw std::runtime_error("bad raw grid header in " + path);
  ImageGrid img(static_cast<int>(w), static_cast<int>(h));
  static_assert(sizeof(double) == 8);
  in.read(reinterpret_cast<char*>(img.values.data()),
          static_cast<std::streamsize>(img.values.size() * 8));
  if (!in) throw std::runtime_error("truncated raw grid data in " + path);
  return img;
}

void write_raw(const ImageGrid& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_u32_le(out, static_cast<std::uint32_t>(img.width));
  write_u32_le(out, static_cast<std::uint32_t>(img.height));
  out.write(reinterpret_cast<const char*>(img.values.data()),
            static_cast<std::streamsize>(img.values.size() * 8));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace deblur
