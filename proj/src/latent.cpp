#include "fftdeblur/latent.hpp"

#include <algorithm>
#include <cmath>

namespace fftdeblur {

namespace {

constexpr double kDenominatorFloor = 1e-12;

std::size_t count_support(const GradientField& g) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.gx.size(); ++i)
    if (g.gx[i] != 0.0 || g.gy[i] != 0.0) ++n;
  return n;
}

}  // namespace

ImagePlane find_m(const ImagePlane& s) {
  const FrequencyPlane f = fft2(s);
  ImagePlane out(s.height(), s.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, f[i].real());
  return out;
}

ImagePlane threshold_ftr(const ImagePlane& ftr, double mu, double alpha, double lambda_ftr) {
  if (!(mu > 0.0) || !(alpha > 0.0))
    throw Error(Errc::InvalidParameter, "threshold_ftr requires mu > 0 and alpha > 0");
  const double cut = lambda_ftr / alpha;
  ImagePlane out = ftr;
  for (auto& v : out.data())
    if (mu * v * v < cut) v = 0.0;
  return out;
}

GradientField hard_threshold_gradients(const ImagePlane& s, double lambda, double beta) {
  if (!(beta > 0.0)) throw Error(Errc::InvalidParameter, "beta must be positive");
  GradientField g = gradients(s);
  const double cut = lambda / beta;
  for (std::size_t i = 0; i < g.gx.size(); ++i) {
    if (g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i] < cut) {
      g.gx[i] = 0.0;
      g.gy[i] = 0.0;
    }
  }
  return g;
}

FtrTarget make_ftr_target(const ImagePlane& s, double mu, double alpha, double lambda_ftr) {
  ImagePlane ftr = find_m(s);
  ImagePlane active(s.height(), s.width());
  for (std::size_t i = 0; i < ftr.size(); ++i) active[i] = ftr[i] > 0.0 ? 1.0 : 0.0;
  return {threshold_ftr(ftr, mu, alpha, lambda_ftr), std::move(active)};
}

// ---------------------------------------------------------------------------

QuadraticSolver::QuadraticSolver(const ImagePlane& b, const Kernel& k)
    : height_(b.height()), width_(b.width()) {
  const FrequencyPlane otf = psf2otf(k, height_, width_);
  const std::vector<Complex> fb = rfft2(b);
  const DifferenceOtfs d = difference_otfs(height_, width_);
  const std::size_t half = width_ / 2 + 1;
  data_numerator_.resize(fb.size());
  kernel_power_.resize(fb.size());
  diff_power_.resize(fb.size());
  for (std::size_t r = 0; r < height_; ++r) {
    for (std::size_t c = 0; c < half; ++c) {
      const std::size_t i = r * half + c;
      data_numerator_[i] = std::conj(otf(r, c)) * fb[i];
      kernel_power_[i] = std::norm(otf(r, c));
      diff_power_[i] = std::norm(d.dx(r, c)) + std::norm(d.dy(r, c));
    }
  }
}

ImagePlane QuadraticSolver::solve(const GradientField& g, double beta, const FtrTarget* ftr,
                                  double ftr_weight) const {
  // beta * (conj(Dx) F(gx) + conj(Dy) F(gy)) == beta * F(Dx^T gx + Dy^T gy)
  std::vector<Complex> z = rfft2(gradients_adjoint(g));
  const std::size_t half = width_ / 2 + 1;
  for (std::size_t r = 0; r < height_; ++r) {
    for (std::size_t c = 0; c < half; ++c) {
      const std::size_t i = r * half + c;
      const Complex num = data_numerator_[i] + beta * z[i];
      const double den = kernel_power_[i] + beta * diff_power_[i];
      double re_num = num.real(), re_den = den;
      const std::size_t full = r * width_ + c;
      if (ftr != nullptr && ftr->active[full] > 0.0) {
        // The ReLU term only constrains the real part of each bin; bins i and -i
        // share it, so the per-bin solve stays decoupled and Hermitian.
        re_num += ftr_weight * ftr->target[full];
        re_den += ftr_weight;
      }
      z[i] = Complex(re_num / std::max(re_den, kDenominatorFloor),
                     num.imag() / std::max(den, kDenominatorFloor));
    }
  }
  ImagePlane s = irfft2(std::move(z), height_, width_);
  if (!s.all_finite()) throw Error(Errc::NonFiniteState, "latent update produced NaN/Inf");
  return s;
}

ImagePlane update_latent(const ImagePlane& b_pad, const Kernel& k, const GradientField& g,
                         const FtrTarget& ftr, double alpha, double beta, double mu) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(mu > 0.0))
    throw Error(Errc::InvalidParameter, "update_latent requires alpha, beta, mu > 0");
  if (!g.gx.same_shape(b_pad) || !g.gy.same_shape(b_pad) || !ftr.target.same_shape(b_pad) ||
      !ftr.active.same_shape(b_pad))
    throw Error(Errc::DimensionMismatch, "update_latent inputs differ in size");
  const QuadraticSolver solver(b_pad, k);
  return solver.solve(g, beta, &ftr, alpha * mu);
}

ImagePlane l0deblur_ftr(const ImagePlane& b, const Kernel& k, double lambda_ftr,
                        double lambda_grad, double kappa, const DeblurParams& params,
                        FtrTrace* trace) {
  if (!(kappa > 1.0)) throw Error(Errc::InvalidParameter, "kappa must exceed 1");
  if (!(lambda_ftr > 0.0) || !(lambda_grad > 0.0))
    throw Error(Errc::InvalidParameter, "lambdas must be positive");

  const std::size_t h = b.height(), w = b.width();
  const std::size_t ph = opt_fft_size(h + k.size() - 1);
  const std::size_t pw = opt_fft_size(w + k.size() - 1);
  const ImagePlane b_pad = wrap_boundary(b, ph, pw);
  const QuadraticSolver solver(b_pad, k);

  const double alpha_max = params.alpha_ceiling(lambda_ftr);
  const double beta_max = params.beta_ceiling(lambda_grad);
  const double mu = params.mu;

  if (trace != nullptr) *trace = {};
  ImagePlane s = b_pad;
  for (double alpha = 2.0 * lambda_ftr; alpha < alpha_max; alpha *= kappa) {
    const FtrTarget ftr = make_ftr_target(s, mu, alpha, lambda_ftr);
    if (trace != nullptr) {
      ++trace->outer_iterations;
      trace->gradient_support.emplace_back();
    }
    for (double beta = 2.0 * lambda_grad; beta < beta_max; beta *= kappa) {
      const GradientField g = hard_threshold_gradients(s, lambda_grad, beta);
      s = solver.solve(g, beta, &ftr, alpha * mu);
      if (trace != nullptr) {
        ++trace->inner_iterations;
        trace->gradient_support.back().push_back(count_support(g));
      }
    }
  }
  return s.crop(h, w);
}

}  // namespace fftdeblur
