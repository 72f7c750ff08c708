#include "fftdeblur/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fftdeblur {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::KernelTooLarge: return "KernelTooLarge";
    case Errc::PadTooSmall: return "PadTooSmall";
    case Errc::DegenerateKernel: return "DegenerateKernel";
    case Errc::AllZeroGradients: return "AllZeroGradients";
    case Errc::EmptyKernel: return "EmptyKernel";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::Io: return "IoError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// ImagePlane

ImagePlane::ImagePlane(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), data_(height * width, fill) {
  if (height == 0 || width == 0)
    throw Error(Errc::InvalidParameter, "image plane must be at least 1x1");
}

ImagePlane::ImagePlane(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height == 0 || width == 0)
    throw Error(Errc::InvalidParameter, "image plane must be at least 1x1");
  if (data_.size() != height * width)
    throw Error(Errc::DimensionMismatch, "data length " + std::to_string(data_.size()) +
                                             " != " + std::to_string(height * width));
}

bool ImagePlane::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double ImagePlane::sum() const noexcept { return std::accumulate(data_.begin(), data_.end(), 0.0); }

ImagePlane ImagePlane::crop(std::size_t height, std::size_t width) const {
  if (height > height_ || width > width_)
    throw Error(Errc::DimensionMismatch, "crop larger than plane");
  ImagePlane out(height, width);
  for (std::size_t r = 0; r < height; ++r)
    std::copy_n(data_.begin() + std::ptrdiff_t(r * width_), width,
                out.data_.begin() + std::ptrdiff_t(r * width));
  return out;
}

// ---------------------------------------------------------------------------
// ImageTensor

ImageTensor::ImageTensor(std::vector<ImagePlane> channels) : channels_(std::move(channels)) {
  if (channels_.size() != 1 && channels_.size() != 3)
    throw Error(Errc::InvalidParameter,
                "image must have 1 or 3 channels, got " + std::to_string(channels_.size()));
  for (const auto& c : channels_)
    if (!c.same_shape(channels_.front()))
      throw Error(Errc::DimensionMismatch, "channels differ in size");
}

ImageTensor::ImageTensor(ImagePlane gray) {
  channels_.push_back(std::move(gray));
}

bool ImageTensor::same_shape(const ImageTensor& other) const noexcept {
  return channels() == other.channels() && height() == other.height() && width() == other.width();
}

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(std::size_t size, double fill) : size_(size), weights_(size * size, fill) {
  if (size % 2 == 0)
    throw Error(Errc::InvalidParameter, "kernel size must be odd, got " + std::to_string(size));
}

Kernel::Kernel(std::size_t size, std::vector<double> weights)
    : size_(size), weights_(std::move(weights)) {
  if (size % 2 == 0)
    throw Error(Errc::InvalidParameter, "kernel size must be odd, got " + std::to_string(size));
  if (weights_.size() != size * size)
    throw Error(Errc::DimensionMismatch, "kernel weights do not match size");
}

Kernel Kernel::delta(std::size_t size) {
  Kernel k(size);
  k(k.center(), k.center()) = 1.0;
  return k;
}

Kernel Kernel::uniform(std::size_t size) {
  return Kernel(size, 1.0 / double(size * size));
}

double Kernel::sum() const noexcept { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

bool Kernel::is_normalized(double tol) const noexcept {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w >= 0.0; }) &&
         std::abs(sum() - 1.0) <= tol;
}

// ---------------------------------------------------------------------------
// Operators

GradientField gradients(const ImagePlane& plane) {
  const std::size_t h = plane.height(), w = plane.width();
  GradientField g{ImagePlane(h, w), ImagePlane(h, w)};
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t rn = (r + 1 == h) ? 0 : r + 1;
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t cn = (c + 1 == w) ? 0 : c + 1;
      g.gx(r, c) = plane(r, cn) - plane(r, c);
      g.gy(r, c) = plane(rn, c) - plane(r, c);
    }
  }
  return g;
}

ImagePlane gradients_adjoint(const GradientField& field) {
  const std::size_t h = field.gx.height(), w = field.gx.width();
  if (!field.gy.same_shape(field.gx))
    throw Error(Errc::DimensionMismatch, "gradient components differ in size");
  ImagePlane out(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t rp = (r == 0) ? h - 1 : r - 1;
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t cp = (c == 0) ? w - 1 : c - 1;
      out(r, c) = field.gx(r, cp) - field.gx(r, c) + field.gy(rp, c) - field.gy(r, c);
    }
  }
  return out;
}

ImagePlane convolve_circular(const ImagePlane& plane, const Kernel& k) {
  const std::size_t h = plane.height(), w = plane.width();
  if (k.size() > std::min(h, w))
    throw Error(Errc::KernelTooLarge, "kernel " + std::to_string(k.size()) + " exceeds plane " +
                                          std::to_string(h) + "x" + std::to_string(w));
  const std::ptrdiff_t n = std::ptrdiff_t(k.size());
  const std::ptrdiff_t half = n / 2;
  const std::ptrdiff_t H = std::ptrdiff_t(h), W = std::ptrdiff_t(w);

  ImagePlane out(h, w);
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    // Tap (a,b) sampled at offset (a - half, b - half) reads P[i - dy, j - dx].
    const std::ptrdiff_t dy = a - half;
    for (std::ptrdiff_t b = 0; b < n; ++b) {
      const double weight = k(std::size_t(a), std::size_t(b));
      if (weight == 0.0) continue;
      const std::ptrdiff_t dx = b - half;
      for (std::ptrdiff_t i = 0; i < H; ++i) {
        const std::ptrdiff_t si = ((i - dy) % H + H) % H;
        double* dst = &out(std::size_t(i), 0);
        const double* src = plane.data().data() + std::size_t(si) * w;
        // Split the row at the wrap point to keep the inner loop branch-free.
        const std::ptrdiff_t shift = ((-dx) % W + W) % W;  // src col = (j + shift) mod W
        const std::ptrdiff_t first = W - shift;
        for (std::ptrdiff_t j = 0; j < first; ++j) dst[j] += weight * src[j + shift];
        for (std::ptrdiff_t j = first; j < W; ++j) dst[j] += weight * src[j + shift - W];
      }
    }
  }
  return out;
}

ImagePlane luminance(const ImageTensor& image) {
  if (image.channels() == 1) return image[0];
  ImagePlane y(image.height(), image.width());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = 0.299 * image[0][i] + 0.587 * image[1][i] + 0.114 * image[2][i];
  return y;
}

}  // namespace fftdeblur
