#include "doctest.h"

#include <cmath>
#include <random>

#include "fftdeblur/metrics.hpp"
#include "oracles.hpp"

using namespace fftdeblur;

namespace {

ImageTensor gray(ImagePlane p) { return ImageTensor(std::move(p)); }

double two_constant_ssim(double m1, double m2) {
  const double c1 = 1e-4, c2 = 9e-4;
  return (2 * m1 * m2 + c1) * c2 / ((m1 * m1 + m2 * m2 + c1) * c2);
}

Kernel shifted(const Kernel& k, int dy, int dx) {
  Kernel out(k.size());
  const int n = int(k.size());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (r + dy >= 0 && r + dy < n && c + dx >= 0 && c + dx < n)
        out(std::size_t(r + dy), std::size_t(c + dx)) = k(std::size_t(r), std::size_t(c));
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("psnr closed forms") {
  const ImageTensor a = gray(oracle::random_plane(12, 12, 1));
  CHECK(psnr(a, a) == kPsnrInfinite);
  ImageTensor b = a;
  for (auto& v : b[0].data()) v += 1.0;
  CHECK(psnr(a, b) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::round(psnr(gray(ImagePlane(8, 8, 0.0)), gray(ImagePlane(8, 8, 0.1))) * 1e4) / 1e4 == 20.0);
  CHECK(psnr(gray(ImagePlane(8, 8, 0.0)), gray(ImagePlane(8, 8, 0.5)), 2.0) ==
        doctest::Approx(10 * std::log10(16.0)).epsilon(1e-12));
}

TEST_CASE("psnr symmetry and channel permutation") {
  std::vector<ImagePlane> pa, pb;
  for (std::uint64_t s = 0; s < 3; ++s) {
    pa.push_back(oracle::random_plane(9, 7, s));
    pb.push_back(oracle::random_plane(9, 7, s + 10));
  }
  const ImageTensor a(pa), b(pb);
  CHECK(psnr(a, b) == psnr(b, a));
  const ImageTensor ap(std::vector<ImagePlane>{pa[2], pa[0], pa[1]});
  const ImageTensor bp(std::vector<ImagePlane>{pb[2], pb[0], pb[1]});
  CHECK(psnr(ap, bp) == doctest::Approx(psnr(a, b)).epsilon(1e-14));
}

TEST_CASE("psnr errors") {
  CHECK_THROWS_AS(psnr(gray(ImagePlane(4, 4)), gray(ImagePlane(4, 5))), Error);
  CHECK_THROWS_AS(psnr(gray(ImagePlane(4, 4)), gray(ImagePlane(4, 4)), 0.0), Error);
}

TEST_CASE("ssim of identical images is one") {
  const ImageTensor a = gray(oracle::random_plane(30, 40, 2));
  CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-9);
}

TEST_CASE("ssim two-constant closed form") {
  for (auto [m1, m2] : {std::pair{0.2, 0.8}, {0.0, 0.5}, {0.9, 0.3}}) {
    const double v = ssim(gray(ImagePlane(16, 20, m1)), gray(ImagePlane(16, 20, m2)));
    CHECK(std::abs(v - two_constant_ssim(m1, m2)) <= 1e-6);
  }
}

TEST_CASE("ssim drops under a shift of textured content") {
  const ImagePlane a = oracle::random_plane(40, 40, 3);
  ImagePlane b(40, 40);
  for (std::size_t r = 0; r < 40; ++r)
    for (std::size_t c = 0; c < 40; ++c) b(r, c) = a(r, (c + 5) % 40);
  CHECK(ssim(a, b) < 1.0);
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
}

TEST_CASE("ssim is bounded on random inputs") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> side(11, 14);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t h = side(rng), w = side(rng);
    const double v = ssim(oracle::random_plane(h, w, rng()), oracle::random_plane(h, w, rng(), -0.5, 1.5));
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("ssim uses luminance for RGB") {
  const ImagePlane r = oracle::random_plane(16, 16, 1), g = oracle::random_plane(16, 16, 2),
                   b = oracle::random_plane(16, 16, 3);
  const ImageTensor rgb(std::vector<ImagePlane>{r, g, b});
  const ImageTensor other(std::vector<ImagePlane>{g, b, r});
  CHECK(ssim(rgb, other) == ssim(luminance(rgb), luminance(other)));
}

TEST_CASE("ssim errors") {
  try {
    ssim(gray(ImagePlane(10, 30)), gray(ImagePlane(10, 30)));
    FAIL("expected ImageTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ImageTooSmall);
  }
  try {
    ssim(gray(ImagePlane(20, 30)), gray(ImagePlane(20, 31)));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DimensionMismatch);
  }
}

TEST_CASE("quality bundles both scores") {
  const ImageTensor a = gray(oracle::random_plane(16, 16, 1)), b = gray(oracle::random_plane(16, 16, 2));
  const QualityScore q = quality(a, b);
  CHECK(q.psnr_db == psnr(a, b));
  CHECK(q.ssim == ssim(a, b));
}

TEST_CASE("kernel similarity") {
  const Kernel k = oracle::random_kernel(7, 3);
  CHECK(kernel_similarity(k, k) == doctest::Approx(1.0).epsilon(1e-12));

  Kernel line(9);
  for (std::size_t c = 3; c <= 5; ++c) line(4, c) = 1.0 / 3.0;
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx)
      CHECK(std::abs(kernel_similarity(line, shifted(line, dy, dx)) - 1.0) <= 1e-12);

  for (std::size_t len : {3, 5, 7}) {
    Kernel h(7), v(7);
    for (std::size_t i = 0; i < len; ++i) {
      h(3, 3 - len / 2 + i) = 1.0 / double(len);
      v(3 - len / 2 + i, 3) = 1.0 / double(len);
    }
    CHECK(kernel_similarity(h, v) == doctest::Approx(1.0 / double(len)).epsilon(1e-12));
  }
  CHECK(kernel_similarity(k, Kernel(7)) == 0.0);
  CHECK(kernel_similarity(Kernel::delta(5), Kernel::delta(15)) == doctest::Approx(1.0));
}

}
