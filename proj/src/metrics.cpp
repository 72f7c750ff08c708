#include "fftdeblur/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace fftdeblur {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_window() {
  std::vector<double> w(kWindow * kWindow);
  double total = 0.0;
  for (int r = 0; r < kWindow; ++r)
    for (int c = 0; c < kWindow; ++c) {
      const double dr = r - kWindow / 2, dc = c - kWindow / 2;
      total += w[std::size_t(r * kWindow + c)] = std::exp(-(dr * dr + dc * dc) / (2 * kSigma * kSigma));
    }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

double psnr(const ImageTensor& a, const ImageTensor& b, double peak) {
  if (!a.same_shape(b)) throw Error(Errc::DimensionMismatch, "psnr inputs differ in shape");
  if (!(peak > 0.0)) throw Error(Errc::InvalidParameter, "peak must be positive");
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < a.channels(); ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) {
      const double d = a[c][i] - b[c][i];
      sq += d * d;
      ++count;
    }
  const double mse = sq / double(count);
  if (mse == 0.0) return kPsnrInfinite;
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const ImagePlane& a, const ImagePlane& b) {
  if (!a.same_shape(b)) throw Error(Errc::DimensionMismatch, "ssim inputs differ in shape");
  if (std::min(a.height(), a.width()) < std::size_t(kWindow))
    throw Error(Errc::ImageTooSmall, "ssim needs at least 11x11 pixels");
  static const std::vector<double> window = gaussian_window();

  const std::size_t out_h = a.height() - kWindow + 1, out_w = a.width() - kWindow + 1;
  double total = 0.0;
  for (std::size_t r = 0; r < out_h; ++r) {
    for (std::size_t c = 0; c < out_w; ++c) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int dr = 0; dr < kWindow; ++dr)
        for (int dc = 0; dc < kWindow; ++dc) {
          const double wv = window[std::size_t(dr * kWindow + dc)];
          const double va = a(r + std::size_t(dr), c + std::size_t(dc));
          const double vb = b(r + std::size_t(dr), c + std::size_t(dc));
          ma += wv * va;
          mb += wv * vb;
          saa += wv * va * va;
          sbb += wv * vb * vb;
          sab += wv * va * vb;
        }
      const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + kC1) * (2 * cov + kC2)) /
               ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
    }
  }
  return total / double(out_h * out_w);
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
  if (!a.same_shape(b)) throw Error(Errc::DimensionMismatch, "ssim inputs differ in shape");
  return ssim(luminance(a), luminance(b));
}

QualityScore quality(const ImageTensor& a, const ImageTensor& b, double peak) {
  return {psnr(a, b, peak), ssim(a, b)};
}

double kernel_similarity(const Kernel& k1, const Kernel& k2) {
  double n1 = 0.0, n2 = 0.0;
  for (double v : k1.weights()) n1 += v * v;
  for (double v : k2.weights()) n2 += v * v;
  if (n1 == 0.0 || n2 == 0.0) return 0.0;

  const std::ptrdiff_t s1 = std::ptrdiff_t(k1.size()), s2 = std::ptrdiff_t(k2.size());
  // Offsets are measured between kernel centers so unequal sizes align sensibly.
  const std::ptrdiff_t c1 = s1 / 2, c2 = s2 / 2;
  const std::ptrdiff_t reach = c1 + c2;
  double best = 0.0;
  for (std::ptrdiff_t oy = -reach; oy <= reach; ++oy) {
    for (std::ptrdiff_t ox = -reach; ox <= reach; ++ox) {
      double dot = 0.0;
      for (std::ptrdiff_t r = 0; r < s1; ++r) {
        const std::ptrdiff_t r2 = r - c1 + c2 + oy;
        if (r2 < 0 || r2 >= s2) continue;
        for (std::ptrdiff_t c = 0; c < s1; ++c) {
          const std::ptrdiff_t cc2 = c - c1 + c2 + ox;
          if (cc2 < 0 || cc2 >= s2) continue;
          dot += k1(std::size_t(r), std::size_t(c)) * k2(std::size_t(r2), std::size_t(cc2));
        }
      }
      best = std::max(best, dot);
    }
  }
  return std::clamp(best / std::sqrt(n1 * n2), 0.0, 1.0);
}

}  // namespace fftdeblur
