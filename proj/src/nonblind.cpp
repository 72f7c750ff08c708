#include "fftdeblur/nonblind.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fftdeblur/latent.hpp"
#include "fftdeblur/parallel.hpp"
#include "fftdeblur/spectral.hpp"

namespace fftdeblur {

namespace {

double shrink(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

double tv_objective(const ImagePlane& x, const ImagePlane& y, const Kernel& k, double lambda_tv) {
  const ImagePlane kx = convolve_circular(x, k);
  const GradientField g = gradients(x);
  double data = 0.0, tv = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    data += (kx[i] - y[i]) * (kx[i] - y[i]);
    tv += std::abs(g.gx[i]) + std::abs(g.gy[i]);
  }
  return 0.5 * data + lambda_tv * tv;
}

ImagePlane deblur_adm_aniso(const ImagePlane& y, const Kernel& k, double lambda_tv,
                            const AdmOptions& options, AdmTrace* trace) {
  if (!(lambda_tv > 0.0)) throw Error(Errc::InvalidParameter, "lambda_tv must be positive");
  if (!(options.rho0 > 0.0) || !(options.rho_growth >= 1.0) || options.sweeps < 0 ||
      !(options.tolerance >= 0.0) || options.check_interval < 1 ||
      options.max_inner_iterations < 1)
    throw Error(Errc::InvalidParameter, "invalid ADM schedule");

  const QuadraticSolver solver(y, k);
  const std::size_t n = y.size();
  ImagePlane x = y;
  GradientField u = gradients(x);
  GradientField dual{ImagePlane(y.height(), y.width()), ImagePlane(y.height(), y.width())};
  GradientField target{ImagePlane(y.height(), y.width()), ImagePlane(y.height(), y.width())};

  if (trace != nullptr) *trace = {};
  double rho = options.rho0;
  double previous = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    double objective = previous, checked = previous;
    int steps = 0;
    while (steps < options.max_inner_iterations) {
      ++steps;
      for (std::size_t i = 0; i < n; ++i) {
        target.gx[i] = u.gx[i] - dual.gx[i];
        target.gy[i] = u.gy[i] - dual.gy[i];
      }
      // Same normal equations as the half-quadratic latent solve with beta = rho.
      x = solver.solve(target, rho);
      const GradientField g = gradients(x);
      const double t = lambda_tv / rho;
      for (std::size_t i = 0; i < n; ++i) {
        u.gx[i] = shrink(g.gx[i] + dual.gx[i], t);
        u.gy[i] = shrink(g.gy[i] + dual.gy[i], t);
        dual.gx[i] += g.gx[i] - u.gx[i];
        dual.gy[i] += g.gy[i] - u.gy[i];
      }
      if (steps % options.check_interval != 0 && steps != options.max_inner_iterations) continue;
      objective = tv_objective(x, y, k, lambda_tv);
      const bool stalled = checked - objective <= options.tolerance * std::abs(objective);
      checked = objective;
      if (stalled && objective <= previous) break;
    }
    if (trace != nullptr) {
      trace->objective.push_back(objective);
      trace->iterations.push_back(steps);
    }
    previous = objective;
    // Scaled dual is multiplier / rho; keep the multiplier fixed across the rho change.
    const double next = rho * options.rho_growth;
    for (std::size_t i = 0; i < n; ++i) {
      dual.gx[i] *= rho / next;
      dual.gy[i] *= rho / next;
    }
    rho = next;
  }
  if (!x.all_finite()) throw Error(Errc::NonFiniteState, "ADM produced NaN/Inf");
  return x;
}

ImagePlane l0_restoration(const ImagePlane& y, const Kernel& k, double lambda_l0, double kappa,
                          double beta_max) {
  if (!(kappa > 1.0)) throw Error(Errc::InvalidParameter, "kappa must exceed 1");
  if (!(lambda_l0 > 0.0)) throw Error(Errc::InvalidParameter, "lambda_l0 must be positive");
  const QuadraticSolver solver(y, k);
  ImagePlane x = y;
  for (double beta = 2.0 * lambda_l0; beta < beta_max; beta *= kappa) {
    const GradientField g = hard_threshold_gradients(x, lambda_l0, beta);
    x = solver.solve(g, beta);
  }
  return x;
}

ImagePlane bilateral_filter(const ImagePlane& x, double sigma_spatial, double sigma_range) {
  if (!(sigma_spatial > 0.0) || !(sigma_range > 0.0))
    throw Error(Errc::InvalidParameter, "bilateral sigmas must be positive");
  const std::ptrdiff_t radius = std::ptrdiff_t(std::ceil(3.0 * sigma_spatial));
  const std::ptrdiff_t side = 2 * radius + 1;
  std::vector<double> spatial(std::size_t(side * side));
  for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy)
    for (std::ptrdiff_t dx = -radius; dx <= radius; ++dx)
      spatial[std::size_t((dy + radius) * side + dx + radius)] =
          std::exp(-double(dx * dx + dy * dy) / (2.0 * sigma_spatial * sigma_spatial));

  const std::ptrdiff_t h = std::ptrdiff_t(x.height()), w = std::ptrdiff_t(x.width());
  const double range_scale = -1.0 / (2.0 * sigma_range * sigma_range);
  ImagePlane out(x.height(), x.width());

  parallel_for(std::size_t(h), [&](std::size_t row) {
    const std::ptrdiff_t r = std::ptrdiff_t(row);
    std::vector<const double*> rows(static_cast<std::size_t>(side));
    for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy)
      rows[std::size_t(dy + radius)] =
          x.data().data() + std::size_t(std::clamp(r + dy, std::ptrdiff_t(0), h - 1)) * std::size_t(w);
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      const double center = x(std::size_t(r), std::size_t(c));
      double num = 0.0, den = 0.0;
      const bool interior = c >= radius && c + radius < w;
      for (std::ptrdiff_t dy = 0; dy < side; ++dy) {
        const double* src = rows[std::size_t(dy)];
        const double* sw = &spatial[std::size_t(dy * side)];
        for (std::ptrdiff_t dx = 0; dx < side; ++dx) {
          const std::ptrdiff_t cc =
              interior ? c + dx - radius : std::clamp(c + dx - radius, std::ptrdiff_t(0), w - 1);
          const double v = src[cc];
          const double d = v - center;
          const double weight = sw[dx] * std::exp(d * d * range_scale);
          num += weight * v;
          den += weight;
        }
      }
      out(std::size_t(r), std::size_t(c)) = num / den;
    }
  });
  return out;
}

ImageTensor bilateral_filter(const ImageTensor& x, double sigma_spatial, double sigma_range) {
  std::vector<ImagePlane> channels;
  channels.reserve(x.channels());
  for (const auto& c : x) channels.push_back(bilateral_filter(c, sigma_spatial, sigma_range));
  return ImageTensor(std::move(channels));
}

ImageTensor remove_ringing(const ImageTensor& y, const Kernel& k, const RingingConfig& cfg) {
  const std::size_t h = y.height(), w = y.width(), channels = y.channels();
  if (k.size() > std::min(h, w)) throw Error(Errc::KernelTooLarge, "kernel exceeds image");
  const std::size_t ph = opt_fft_size(h + k.size() - 1);
  const std::size_t pw = opt_fft_size(w + k.size() - 1);

  std::vector<ImagePlane> padded(channels), tv(channels);
  parallel_for(channels, [&](std::size_t c) {
    padded[c] = wrap_boundary(y[c], ph, pw);
    tv[c] = deblur_adm_aniso(padded[c], k, cfg.lambda_tv, cfg.adm).crop(h, w);
  });
  ImageTensor latent_tv(std::move(tv));
  if (cfg.weight_ring == 0.0) return latent_tv;

  std::vector<ImagePlane> diff(channels);
  parallel_for(channels, [&](std::size_t c) {
    const ImagePlane l0 =
        l0_restoration(padded[c], k, cfg.lambda_l0, cfg.l0_kappa, cfg.l0_beta_max).crop(h, w);
    diff[c] = latent_tv[c];
    for (std::size_t i = 0; i < diff[c].size(); ++i) diff[c][i] -= l0[i];
  });
  const ImageTensor filtered =
      bilateral_filter(ImageTensor(std::move(diff)), cfg.bilateral_spatial, cfg.bilateral_range);

  ImageTensor result = latent_tv;
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t i = 0; i < result[c].size(); ++i)
      result[c][i] -= cfg.weight_ring * filtered[c][i];
  return result;
}

}  // namespace fftdeblur
