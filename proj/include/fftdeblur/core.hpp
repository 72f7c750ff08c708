#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fftdeblur/error.hpp"

namespace fftdeblur {

// Real-valued 2-D plane, row-major. Intensities are nominally in [0,1].
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t height, std::size_t width, double fill = 0.0);
  ImagePlane(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * width_ + col];
  }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const ImagePlane& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;
  double sum() const noexcept;
  double mean() const noexcept { return data_.empty() ? 0.0 : sum() / double(data_.size()); }

  // Top-left height x width block.
  ImagePlane crop(std::size_t height, std::size_t width) const;

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

// 1 (grayscale) or 3 (RGB) planes of identical size.
class ImageTensor {
 public:
  ImageTensor() = default;
  explicit ImageTensor(std::vector<ImagePlane> channels);
  explicit ImageTensor(ImagePlane gray);

  std::size_t channels() const noexcept { return channels_.size(); }
  std::size_t height() const noexcept { return channels_.empty() ? 0 : channels_[0].height(); }
  std::size_t width() const noexcept { return channels_.empty() ? 0 : channels_[0].width(); }

  ImagePlane& operator[](std::size_t c) noexcept { return channels_[c]; }
  const ImagePlane& operator[](std::size_t c) const noexcept { return channels_[c]; }

  auto begin() noexcept { return channels_.begin(); }
  auto end() noexcept { return channels_.end(); }
  auto begin() const noexcept { return channels_.begin(); }
  auto end() const noexcept { return channels_.end(); }

  bool same_shape(const ImageTensor& other) const noexcept;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  std::vector<ImagePlane> channels_;
};

// Square PSF with odd side length. Normalized kernels are non-negative and sum to 1.
class Kernel {
 public:
  Kernel() : Kernel(1) {}
  explicit Kernel(std::size_t size, double fill = 0.0);
  Kernel(std::size_t size, std::vector<double> weights);

  static Kernel delta(std::size_t size);
  static Kernel uniform(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  std::size_t center() const noexcept { return size_ / 2; }

  double& operator()(std::size_t row, std::size_t col) noexcept { return weights_[row * size_ + col]; }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return weights_[row * size_ + col];
  }

  std::span<double> weights() noexcept { return weights_; }
  std::span<const double> weights() const noexcept { return weights_; }

  double sum() const noexcept;
  bool is_normalized(double tol = 1e-12) const noexcept;

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  std::size_t size_;
  std::vector<double> weights_;
};

struct GradientField {
  ImagePlane gx;
  ImagePlane gy;
};

// Forward differences with circular boundary:
// gx(i,j) = P(i, j+1 mod W) - P(i,j), gy(i,j) = P(i+1 mod H, j) - P(i,j).
GradientField gradients(const ImagePlane& plane);

// Adjoint of gradients(): returns D_x^T gx + D_y^T gy (negative divergence).
ImagePlane gradients_adjoint(const GradientField& field);

// Periodic convolution, kernel centered on its middle tap. Throws KernelTooLarge
// when k.size() > min(H, W).
ImagePlane convolve_circular(const ImagePlane& plane, const Kernel& k);

// Rec. 601 luma for RGB, identity for grayscale.
ImagePlane luminance(const ImageTensor& image);

}  // namespace fftdeblur
