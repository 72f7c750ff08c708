#pragma once

#include <cstddef>
#include <optional>

namespace fftdeblur {

// Every scalar consumed by blind estimation, latent estimation and non-blind
// restoration. validate() throws InvalidParameter naming the offending field.
struct DeblurParams {
  double lambda_ftr = 4e-3;   // FFT-ReLU prior weight
  double lambda_grad = 1e-2;  // L0 gradient weight (latent estimation)
  double lambda_tv = 1e-3;    // anisotropic TV weight (non-blind)
  double lambda_l0 = 1e-3;    // L0 gradient weight (non-blind ringing branch)
  double weight_ring = 1.0;
  double kappa = 2.0;         // continuation multiplier for alpha/beta
  int xk_iter = 5;
  double threshold = 0.05;    // initial gradient-selection threshold (luminance units)
  std::size_t kernel_size = 15;
  double psf_reg = 20.0;      // Tikhonov weight of the PSF least-squares solve
  // Continuation ceilings. When unset they follow the current lambdas:
  // alpha_max = 1e5 * lambda_ftr, beta_max = 1e5 * lambda_grad.
  std::optional<double> alpha_max;
  std::optional<double> beta_max;
  double mu = 1.0;
  double decay = 1.1;         // per-iteration divisor of lambda_grad and lambda_ftr

  double alpha_ceiling(double lambda_ftr_now) const {
    return alpha_max ? *alpha_max : 1e5 * lambda_ftr_now;
  }
  double beta_ceiling(double lambda_grad_now) const {
    return beta_max ? *beta_max : 1e5 * lambda_grad_now;
  }

  void validate() const;
};

}  // namespace fftdeblur
