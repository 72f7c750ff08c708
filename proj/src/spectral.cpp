#include "fftdeblur/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

namespace fftdeblur {

namespace {

enum class PlanKind { Forward, Backward, RealForward, RealBackward };

// FFTW planning is not thread-safe, executing a finished plan on new arrays is.
// Plans are cached per (height, width, kind) for the life of the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t h, std::size_t w, PlanKind kind) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(h, w, kind);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW_UNALIGNED: std::vector storage may differ in alignment from the
    // planning buffers, and a fixed codelet choice keeps results reproducible.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int hi = int(h), wi = int(w);
    auto* cbuf = fftw_alloc_complex(h * w);
    auto* rbuf = fftw_alloc_real(h * w);
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::Forward: plan = fftw_plan_dft_2d(hi, wi, cbuf, cbuf, FFTW_FORWARD, flags); break;
      case PlanKind::Backward: plan = fftw_plan_dft_2d(hi, wi, cbuf, cbuf, FFTW_BACKWARD, flags); break;
      case PlanKind::RealForward: plan = fftw_plan_dft_r2c_2d(hi, wi, rbuf, cbuf, flags); break;
      case PlanKind::RealBackward: plan = fftw_plan_dft_c2r_2d(hi, wi, cbuf, rbuf, flags); break;
    }
    fftw_free(cbuf);
    fftw_free(rbuf);
    if (plan == nullptr) throw Error(Errc::InvalidParameter, "FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, PlanKind>, fftw_plan> plans_;
};

void transform_in_place(FrequencyPlane& plane, int sign) {
  fftw_plan plan = PlanCache::instance().get(
      plane.height(), plane.width(), sign == FFTW_FORWARD ? PlanKind::Forward : PlanKind::Backward);
  auto* ptr = reinterpret_cast<fftw_complex*>(plane.data().data());
  fftw_execute_dft(plan, ptr, ptr);
}

bool is_7_smooth(std::size_t m) {
  for (std::size_t p : {2u, 3u, 5u, 7u})
    while (m % p == 0) m /= p;
  return m == 1;
}

}  // namespace

FrequencyPlane::FrequencyPlane(std::size_t height, std::size_t width, Complex fill)
    : height_(height), width_(width), data_(height * width, fill) {
  if (height == 0 || width == 0)
    throw Error(Errc::InvalidParameter, "frequency plane must be at least 1x1");
}

std::vector<Complex> rfft2(const ImagePlane& plane) {
  std::vector<Complex> half(plane.height() * (plane.width() / 2 + 1));
  fftw_plan plan = PlanCache::instance().get(plane.height(), plane.width(), PlanKind::RealForward);
  // Out-of-place r2c leaves its input untouched.
  fftw_execute_dft_r2c(plan, const_cast<double*>(plane.data().data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  return half;
}

ImagePlane irfft2(std::vector<Complex> half, std::size_t height, std::size_t width) {
  if (half.size() != height * (width / 2 + 1))
    throw Error(Errc::DimensionMismatch, "half spectrum does not match the plane size");
  ImagePlane out(height, width);
  fftw_plan plan = PlanCache::instance().get(height, width, PlanKind::RealBackward);
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(half.data()), out.data().data());
  const double scale = 1.0 / double(out.size());
  for (auto& v : out.data()) v *= scale;
  return out;
}

FrequencyPlane fft2(const ImagePlane& plane) {
  const std::size_t h = plane.height(), w = plane.width(), half = w / 2 + 1;
  const std::vector<Complex> packed = rfft2(plane);
  // Unpack the non-redundant half using X[r][c] = conj(X[-r][-c]).
  FrequencyPlane out(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t mr = (h - r) % h;
    for (std::size_t c = 0; c < half; ++c) out(r, c) = packed[r * half + c];
    for (std::size_t c = half; c < w; ++c) out(r, c) = std::conj(packed[mr * half + (w - c)]);
  }
  return out;
}

FrequencyPlane fft2(const FrequencyPlane& plane) {
  FrequencyPlane out = plane;
  transform_in_place(out, FFTW_FORWARD);
  return out;
}

FrequencyPlane ifft2(const FrequencyPlane& spectrum) {
  FrequencyPlane out = spectrum;
  transform_in_place(out, FFTW_BACKWARD);
  const double scale = 1.0 / double(out.size());
  for (auto& v : out.data()) v *= scale;
  return out;
}

ImagePlane ifft2_real(const FrequencyPlane& spectrum) {
  // The real part of the inverse equals the inverse of the Hermitian part of
  // the spectrum, which a complex-to-real transform evaluates from half the bins.
  const std::size_t h = spectrum.height(), w = spectrum.width(), half = w / 2 + 1;
  std::vector<Complex> packed(h * half);
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t mr = (h - r) % h;
    for (std::size_t c = 0; c < half; ++c)
      packed[r * half + c] = 0.5 * (spectrum(r, c) + std::conj(spectrum(mr, (w - c) % w)));
  }
  return irfft2(std::move(packed), h, w);
}

std::size_t opt_fft_size(std::size_t n) {
  if (n == 0) throw Error(Errc::InvalidParameter, "opt_fft_size requires n >= 1");
  std::size_t m = n;
  while (!is_7_smooth(m)) ++m;
  return m;
}

ImagePlane wrap_boundary(const ImagePlane& plane, std::size_t padded_h, std::size_t padded_w) {
  const std::size_t h = plane.height(), w = plane.width();
  if (padded_h < h || padded_w < w)
    throw Error(Errc::PadTooSmall, std::to_string(padded_h) + "x" + std::to_string(padded_w) +
                                       " is smaller than " + std::to_string(h) + "x" +
                                       std::to_string(w));
  ImagePlane out(padded_h, padded_w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) out(r, c) = plane(r, c);

  // Right strip: row r runs from plane(r, w-1) back to plane(r, 0) across the seam.
  const std::size_t pad_w = padded_w - w;
  for (std::size_t r = 0; r < h; ++r) {
    const double a = plane(r, w - 1), b = plane(r, 0);
    for (std::size_t t = 1; t <= pad_w; ++t)
      out(r, w - 1 + t) = a + (b - a) * double(t) / double(pad_w + 1);
  }

  // Bottom strip, then the corner block interpolated row-wise between the two
  // bottom-strip columns it touches; the result is bilinear in the four corners.
  const std::size_t pad_h = padded_h - h;
  for (std::size_t c = 0; c < w; ++c) {
    const double a = plane(h - 1, c), b = plane(0, c);
    for (std::size_t t = 1; t <= pad_h; ++t)
      out(h - 1 + t, c) = a + (b - a) * double(t) / double(pad_h + 1);
  }
  for (std::size_t r = h; r < padded_h; ++r) {
    const double a = out(r, w - 1), b = out(r, 0);
    for (std::size_t t = 1; t <= pad_w; ++t)
      out(r, w - 1 + t) = a + (b - a) * double(t) / double(pad_w + 1);
  }
  return out;
}

FrequencyPlane psf2otf(const Kernel& k, std::size_t height, std::size_t width) {
  if (k.size() > std::min(height, width))
    throw Error(Errc::KernelTooLarge, "kernel " + std::to_string(k.size()) + " exceeds shape " +
                                          std::to_string(height) + "x" + std::to_string(width));
  FrequencyPlane otf(height, width);
  const std::size_t c = k.center();
  for (std::size_t a = 0; a < k.size(); ++a) {
    const std::size_t r = (a + height - c) % height;
    for (std::size_t b = 0; b < k.size(); ++b) {
      const std::size_t col = (b + width - c) % width;
      otf(r, col) = k(a, b);
    }
  }
  transform_in_place(otf, FFTW_FORWARD);
  return otf;
}

Kernel otf2psf(const FrequencyPlane& otf, std::size_t size) {
  const std::size_t h = otf.height(), w = otf.width();
  if (size % 2 == 0) throw Error(Errc::InvalidParameter, "kernel size must be odd");
  if (size > std::min(h, w))
    throw Error(Errc::KernelTooLarge, "kernel " + std::to_string(size) + " exceeds shape " +
                                          std::to_string(h) + "x" + std::to_string(w));
  const ImagePlane spatial = ifft2_real(otf);
  Kernel k(size);
  const std::size_t c = k.center();
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b)
      k(a, b) = spatial((a + h - c) % h, (b + w - c) % w);
  return k;
}

DifferenceOtfs difference_otfs(std::size_t height, std::size_t width) {
  DifferenceOtfs d{FrequencyPlane(height, width), FrequencyPlane(height, width)};
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t u = 0; u < height; ++u) {
    const Complex ey = std::polar(1.0, two_pi * double(u) / double(height)) - 1.0;
    for (std::size_t v = 0; v < width; ++v) {
      d.dx(u, v) = std::polar(1.0, two_pi * double(v) / double(width)) - 1.0;
      d.dy(u, v) = ey;
    }
  }
  return d;
}

}  // namespace fftdeblur
