#pragma once

#include <cstddef>
#include <vector>

#include "fftdeblur/core.hpp"
#include "fftdeblur/params.hpp"

namespace fftdeblur {

struct BlindResult {
  Kernel kernel;
  ImagePlane latent;
  int iterations_run = 0;
  // RMS of (latent (x) kernel - B) after each outer iteration.
  std::vector<double> per_iteration_residual;
  // lambda_grad / lambda_ftr in effect during each outer iteration.
  std::vector<double> lambda_grad_schedule;
  std::vector<double> lambda_ftr_schedule;
};

struct SelectedGradients {
  GradientField field;
  double threshold;  // threshold to use on the next call
};

// Keeps the gradients of S whose magnitude reaches the threshold, halving the
// threshold until at least 2 * kernel_size^2 pixels survive (or it drops below
// 1e-6, in which case everything is kept). The returned threshold is the final
// one divided by 1.1.
SelectedGradients threshold_pxpy(const ImagePlane& s, std::size_t kernel_size, double threshold);

// Fourier-domain Tikhonov least squares for the kernel given blurred (bx, by)
// and latent (sx, sy) gradient planes; crops to size x size and clips negatives.
// Not normalized. Throws AllZeroGradients when sx and sy are identically zero.
Kernel estimate_psf(const ImagePlane& bx, const ImagePlane& by, const ImagePlane& sx,
                    const ImagePlane& sy, double reg, std::size_t size);

// Zeroes 8-connected components of the positive support whose mass is below
// 0.1 x the largest component's mass. Throws EmptyKernel.
Kernel prune_isolated_noise(const Kernel& k);

// Clips negatives and rescales to unit sum. Throws EmptyKernel.
Kernel normalize_kernel(const Kernel& k);

// Alternating latent / kernel estimation on a single plane (luminance).
// Throws DegenerateKernel when the kernel estimate collapses.
BlindResult blind_deconvolve(const ImagePlane& b, const Kernel& k0, const DeblurParams& params);

}  // namespace fftdeblur
