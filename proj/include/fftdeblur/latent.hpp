#pragma once

#include <cstddef>
#include <vector>

#include "fftdeblur/core.hpp"
#include "fftdeblur/params.hpp"
#include "fftdeblur/spectral.hpp"

namespace fftdeblur {

// Rectified real part of the unnormalized forward FFT: max(0, Re F(S)).
ImagePlane find_m(const ImagePlane& s);

// L0 hard threshold of the rectified spectrum: keeps ftr[i] when
// mu * ftr[i]^2 >= lambda_ftr / alpha, zero otherwise.
ImagePlane threshold_ftr(const ImagePlane& ftr, double mu, double alpha, double lambda_ftr);

// gradients(S) with every pixel where gx^2 + gy^2 < lambda / beta zeroed jointly.
GradientField hard_threshold_gradients(const ImagePlane& s, double lambda, double beta);

// Auxiliary state of the FFT-ReLU splitting: the thresholded target M and the
// active set R (bins whose real part was positive when M was formed).
struct FtrTarget {
  ImagePlane target;
  ImagePlane active;
};

// Builds M and R from the current latent estimate.
FtrTarget make_ftr_target(const ImagePlane& s, double mu, double alpha, double lambda_ftr);

// Closed-form minimizer of
//   |S (x) k - B|^2 + beta |grad S - g|^2 + (alpha mu / N) sum_i R_i (Re F(S)_i - M_i)^2
// where N is the pixel count. The ReLU term is linearized around the active set R.
// Throws NonFiniteState.
ImagePlane update_latent(const ImagePlane& b_pad, const Kernel& k, const GradientField& g,
                         const FtrTarget& ftr, double alpha, double beta, double mu);

// Iteration bookkeeping for l0deblur_ftr.
struct FtrTrace {
  int outer_iterations = 0;
  int inner_iterations = 0;
  // Non-zero gradient pixel count after each inner threshold, grouped per outer pass.
  std::vector<std::vector<std::size_t>> gradient_support;
};

// Latent sharp-image estimation with the FFT-ReLU and L0 gradient priors, by
// nested alpha/beta continuation. Output has the size of b.
ImagePlane l0deblur_ftr(const ImagePlane& b, const Kernel& k, double lambda_ftr,
                        double lambda_grad, double kappa, const DeblurParams& params,
                        FtrTrace* trace = nullptr);

// Fourier-domain pieces shared by the half-quadratic solvers: conj(K) F(B),
// |K|^2 and |Dx|^2 + |Dy|^2, kept on the non-redundant half spectrum.
class QuadraticSolver {
 public:
  QuadraticSolver(const ImagePlane& b, const Kernel& k);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

  // argmin |S (x) k - B|^2 + beta |grad S - g|^2 (+ the ReLU term when ftr != nullptr).
  ImagePlane solve(const GradientField& g, double beta, const FtrTarget* ftr = nullptr,
                   double ftr_weight = 0.0) const;

 private:
  std::size_t height_, width_;
  std::vector<Complex> data_numerator_;  // conj(K) F(B)
  std::vector<double> kernel_power_;  // |K|^2
  std::vector<double> diff_power_;    // |Dx|^2 + |Dy|^2
};

}  // namespace fftdeblur
