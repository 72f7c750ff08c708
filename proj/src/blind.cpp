#include "fftdeblur/blind.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fftdeblur/latent.hpp"
#include "fftdeblur/spectral.hpp"

namespace fftdeblur {

namespace {

constexpr double kThresholdFloor = 1e-6;
constexpr double kPruneFraction = 0.1;

bool all_zero(const ImagePlane& p) {
  return std::all_of(p.data().begin(), p.data().end(), [](double v) { return v == 0.0; });
}

void require(bool ok, const char* field) {
  if (!ok) throw Error(Errc::InvalidParameter, std::string("invalid value for ") + field);
}

}  // namespace

void DeblurParams::validate() const {
  require(lambda_ftr > 0.0, "lambda_ftr");
  require(lambda_grad > 0.0, "lambda_grad");
  require(lambda_tv > 0.0, "lambda_tv");
  require(lambda_l0 > 0.0, "lambda_l0");
  require(weight_ring >= 0.0 && std::isfinite(weight_ring), "weight_ring");
  require(kappa > 1.0 && std::isfinite(kappa), "kappa");
  require(xk_iter >= 0, "xk_iter");
  require(threshold >= 0.0 && std::isfinite(threshold), "threshold");
  require(kernel_size % 2 == 1, "kernel_size");
  require(psf_reg > 0.0, "psf_reg");
  require(!alpha_max || *alpha_max > 0.0, "alpha_max");
  require(!beta_max || *beta_max > 0.0, "beta_max");
  require(mu > 0.0, "mu");
  require(decay > 1.0 && std::isfinite(decay), "decay");
}

SelectedGradients threshold_pxpy(const ImagePlane& s, std::size_t kernel_size, double threshold) {
  if (!(threshold >= 0.0)) throw Error(Errc::InvalidParameter, "threshold must be >= 0");
  const GradientField g = gradients(s);
  std::vector<double> magnitude(g.gx.size());
  for (std::size_t i = 0; i < magnitude.size(); ++i)
    magnitude[i] = std::hypot(g.gx[i], g.gy[i]);

  const std::size_t needed = 2 * kernel_size * kernel_size;
  double t = threshold;
  while (true) {
    const auto survivors = std::count_if(magnitude.begin(), magnitude.end(),
                                         [t](double m) { return m >= t && m > 0.0; });
    if (std::size_t(survivors) >= needed || t == 0.0) break;
    t *= 0.5;
    if (t < kThresholdFloor) {
      return {g, t / 1.1};
    }
  }

  GradientField out = g;
  for (std::size_t i = 0; i < magnitude.size(); ++i) {
    if (magnitude[i] < t) {
      out.gx[i] = 0.0;
      out.gy[i] = 0.0;
    }
  }
  return {std::move(out), t / 1.1};
}

Kernel estimate_psf(const ImagePlane& bx, const ImagePlane& by, const ImagePlane& sx,
                    const ImagePlane& sy, double reg, std::size_t size) {
  if (!bx.same_shape(by) || !bx.same_shape(sx) || !bx.same_shape(sy))
    throw Error(Errc::DimensionMismatch, "gradient planes differ in size");
  if (!(reg > 0.0)) throw Error(Errc::InvalidParameter, "psf regularization must be positive");
  if (all_zero(sx) && all_zero(sy))
    throw Error(Errc::AllZeroGradients, "latent gradients are identically zero");

  const FrequencyPlane fbx = fft2(bx), fby = fft2(by), fsx = fft2(sx), fsy = fft2(sy);
  FrequencyPlane otf(bx.height(), bx.width());
  for (std::size_t i = 0; i < otf.size(); ++i) {
    const Complex num = std::conj(fsx[i]) * fbx[i] + std::conj(fsy[i]) * fby[i];
    const double den = std::norm(fsx[i]) + std::norm(fsy[i]) + reg;
    otf[i] = num / den;
  }
  Kernel k = otf2psf(otf, size);
  for (auto& v : k.weights()) v = std::max(v, 0.0);
  return k;
}

Kernel prune_isolated_noise(const Kernel& k) {
  const std::size_t n = k.size();
  std::vector<int> label(n * n, -1);
  std::vector<double> mass;
  std::vector<std::size_t> stack;

  for (std::size_t seed = 0; seed < n * n; ++seed) {
    if (label[seed] >= 0 || !(k.weights()[seed] > 0.0)) continue;
    const int id = int(mass.size());
    mass.push_back(0.0);
    label[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      mass[std::size_t(id)] += k.weights()[p];
      const std::ptrdiff_t r = std::ptrdiff_t(p / n), c = std::ptrdiff_t(p % n);
      for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
        for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
          const std::ptrdiff_t rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= std::ptrdiff_t(n) || cc >= std::ptrdiff_t(n)) continue;
          const std::size_t q = std::size_t(rr) * n + std::size_t(cc);
          if (label[q] >= 0 || !(k.weights()[q] > 0.0)) continue;
          label[q] = id;
          stack.push_back(q);
        }
      }
    }
  }
  if (mass.empty()) throw Error(Errc::EmptyKernel, "kernel has no positive tap");

  const double keep = kPruneFraction * *std::max_element(mass.begin(), mass.end());
  Kernel out(n);
  for (std::size_t i = 0; i < n * n; ++i)
    if (label[i] >= 0 && mass[std::size_t(label[i])] >= keep) out.weights()[i] = k.weights()[i];
  return out;
}

Kernel normalize_kernel(const Kernel& k) {
  Kernel out = k;
  double total = 0.0;
  for (auto& v : out.weights()) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (!(total > 0.0)) throw Error(Errc::EmptyKernel, "kernel has no positive mass");
  for (auto& v : out.weights()) v /= total;
  return out;
}

BlindResult blind_deconvolve(const ImagePlane& b, const Kernel& k0, const DeblurParams& params) {
  params.validate();
  if (!b.all_finite()) throw Error(Errc::NonFiniteState, "blurred image is not finite");
  if (k0.size() > std::min(b.height(), b.width()))
    throw Error(Errc::KernelTooLarge, "initial kernel exceeds image");

  BlindResult result{k0, b, 0, {}, {}, {}};
  if (params.xk_iter == 0) return result;

  const std::size_t h = b.height(), w = b.width();
  const std::size_t ks = k0.size();
  const std::size_t ph = opt_fft_size(h + ks - 1);
  const std::size_t pw = opt_fft_size(w + ks - 1);
  const GradientField blurred = gradients(wrap_boundary(b, ph, pw));

  double lambda_grad = params.lambda_grad;
  double lambda_ftr = params.lambda_ftr;
  double threshold = params.threshold;
  Kernel k = k0;
  ImagePlane s = b;

  for (int iter = 0; iter < params.xk_iter; ++iter) {
    result.lambda_grad_schedule.push_back(lambda_grad);
    result.lambda_ftr_schedule.push_back(lambda_ftr);

    s = l0deblur_ftr(b, k, lambda_ftr, lambda_grad, params.kappa, params);
    // The latent estimate is wrapped to the same padded frame as B's gradients.
    auto selected = threshold_pxpy(wrap_boundary(s, ph, pw), ks, threshold);
    threshold = selected.threshold;

    try {
      k = estimate_psf(blurred.gx, blurred.gy, selected.field.gx, selected.field.gy,
                       params.psf_reg, ks);
      k = normalize_kernel(prune_isolated_noise(k));
    } catch (const Error& e) {
      if (e.code() == Errc::EmptyKernel || e.code() == Errc::AllZeroGradients)
        throw Error(Errc::DegenerateKernel,
                    "kernel estimate collapsed at iteration " + std::to_string(iter + 1) + " (" +
                        e.what() + ")");
      throw;
    }

    const ImagePlane reblurred = convolve_circular(s, k);
    double sq = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) sq += (reblurred[i] - b[i]) * (reblurred[i] - b[i]);
    result.per_iteration_residual.push_back(std::sqrt(sq / double(b.size())));

    lambda_grad /= params.decay;
    lambda_ftr /= params.decay;
    ++result.iterations_run;
  }
  result.kernel = std::move(k);
  result.latent = std::move(s);
  return result;
}

}  // namespace fftdeblur
