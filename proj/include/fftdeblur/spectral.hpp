#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "fftdeblur/core.hpp"

namespace fftdeblur {

using Complex = std::complex<double>;

// Complex 2-D plane, row-major. Forward transforms are unnormalized; inverse
// transforms scale by 1/(H*W).
class FrequencyPlane {
 public:
  FrequencyPlane() = default;
  FrequencyPlane(std::size_t height, std::size_t width, Complex fill = {});

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  Complex& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }
  Complex operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * width_ + col];
  }
  Complex& operator[](std::size_t i) noexcept { return data_[i]; }
  Complex operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  bool same_shape(const FrequencyPlane& o) const noexcept {
    return height_ == o.height_ && width_ == o.width_;
  }
  bool same_shape(const ImagePlane& o) const noexcept {
    return height_ == o.height() && width_ == o.width();
  }

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<Complex> data_;
};

FrequencyPlane fft2(const ImagePlane& plane);
FrequencyPlane fft2(const FrequencyPlane& plane);
FrequencyPlane ifft2(const FrequencyPlane& spectrum);
// Real part of the inverse transform.
ImagePlane ifft2_real(const FrequencyPlane& spectrum);

// Non-redundant half of the spectrum of a real plane: bins (r, c) for
// c <= w/2, stored row-major with w/2 + 1 columns.
std::vector<Complex> rfft2(const ImagePlane& plane);
// Inverse of rfft2 for a Hermitian spectrum given by its half. Consumes `half`.
ImagePlane irfft2(std::vector<Complex> half, std::size_t height, std::size_t width);

// Smallest m >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t opt_fft_size(std::size_t n);

// Pads to padded_h x padded_w. The input occupies the top-left block unchanged;
// each pad strip linearly interpolates between the opposing image edges so the
// result is close to periodic. Throws PadTooSmall.
ImagePlane wrap_boundary(const ImagePlane& plane, std::size_t padded_h, std::size_t padded_w);

// Zero-pads k to height x width with its center tap moved to (0,0), then FFTs.
FrequencyPlane psf2otf(const Kernel& k, std::size_t height, std::size_t width);

// Inverse of psf2otf: inverse FFT, undo the shift, crop the central size x size block.
Kernel otf2psf(const FrequencyPlane& otf, std::size_t size);

// Transfer functions of the circular forward-difference operators used by gradients().
struct DifferenceOtfs {
  FrequencyPlane dx;
  FrequencyPlane dy;
};
DifferenceOtfs difference_otfs(std::size_t height, std::size_t width);

}  // namespace fftdeblur
