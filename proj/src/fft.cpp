#include "deblur/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace deblur {

namespace {

// FFTW planning is not thread-safe; executions on distinct buffers are.
std::mutex plan_mutex;

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

fftw_plan get_plan(int width, int height, bool inverse) {
  static std::map<std::pair<int, int>, PlanPair> plans;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& entry = plans[{width, height}];
  fftw_plan& p = inverse ? entry.backward : entry.forward;
  if (!p) {
    // Dummy buffer for planning; FFTW_ESTIMATE does not touch the data.
    std::vector<std::complex<double>> buf(static_cast<size_t>(width) * height);
    auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
    // fftw uses row-major (n0 = rows, n1 = cols).
    p = fftw_plan_dft_2d(height, width, ptr, ptr,
                         inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  return p;
}

}  // namespace

cvec dft2(const cvec& data, int width, int height, bool inverse) {
  if (data.size() != static_cast<size_t>(width) * height)
    throw DimensionError("dft2: data length does not match shape");
  cvec out(data);
  fftw_plan p = get_plan(width, height, inverse);
  auto* ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(p, ptr, ptr);
  if (inverse) {
    const double scale = 1.0 / (static_cast<double>(width) * height);
    for (auto& v : out) v *= scale;
  }
  return out;
}

cvec dft2(const ImageGrid& img) {
  cvec data(img.values.size());
  for (size_t i = 0; i < data.size(); ++i) data[i] = img.values[i];
  return dft2(data, img.width, img.height, false);
}

ImageGrid idft2_real(const cvec& spectrum, int width, int height) {
  cvec out = dft2(spectrum, width, height, true);
  ImageGrid img(width, height);
  for (size_t i = 0; i < out.size(); ++i) img.values[i] = out[i].real();
  return img;
}

}  // namespace deblur
