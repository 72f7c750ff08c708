#pragma once

#include <limits>

#include "fftdeblur/core.hpp"

namespace fftdeblur {

struct QualityScore {
  double psnr_db;
  double ssim;
};

// Returned by psnr() for identical inputs.
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

// 10 log10(peak^2 / MSE) over all channels and pixels. Throws DimensionMismatch.
double psnr(const ImageTensor& a, const ImageTensor& b, double peak = 1.0);

// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5, K1 0.01, K2 0.03,
// dynamic range 1) on luminance. Throws DimensionMismatch, ImageTooSmall.
double ssim(const ImageTensor& a, const ImageTensor& b);
double ssim(const ImagePlane& a, const ImagePlane& b);

QualityScore quality(const ImageTensor& a, const ImageTensor& b, double peak = 1.0);

// Maximum normalized cross-correlation over all integer translations.
double kernel_similarity(const Kernel& k1, const Kernel& k2);

}  // namespace fftdeblur
