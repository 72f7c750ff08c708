#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fftdeblur/bench.hpp"
#include "fftdeblur/blind.hpp"
#include "fftdeblur/cli.hpp"
#include "fftdeblur/io.hpp"
#include "fftdeblur/latent.hpp"
#include "fftdeblur/metrics.hpp"
#include "fftdeblur/nonblind.hpp"
#include "fftdeblur/parallel.hpp"
#include "fftdeblur/pipeline.hpp"
#include "fftdeblur/spectral.hpp"
#include "oracles.hpp"
#include "tmpdir.hpp"

using namespace fftdeblur;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ImageTensor cameraman() {
  return io::read_image(std::string(FFTDEBLUR_TEST_DATA) + "/cameraman_256.png").image;
}

double rel_rms(const ImagePlane& a, const ImagePlane& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

Outcome spectral_identities() {
  double roundtrip = 0.0, delta = 0.0, dc = 0.0, inverse = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImagePlane p = oracle::random_plane(16 + 3 * seed, 70 - 2 * seed, seed);
    roundtrip = std::max(roundtrip, rel_rms(ifft2_real(fft2(p)), p));
  }
  for (std::size_t size = 1; size <= 15; size += 2) {
    const FrequencyPlane d = psf2otf(Kernel::delta(size), 32, 40);
    for (const auto& v : d.data()) delta = std::max(delta, std::abs(v - Complex(1.0)));
    for (std::size_t h = 16; h <= 64; ++h) {
      for (std::size_t w = 16; w <= 64; w += 3) {
        const Kernel k = oracle::random_kernel(size, h * 100 + w + size);
        const FrequencyPlane otf = psf2otf(k, h, w);
        dc = std::max(dc, std::abs(otf[0] - Complex(k.sum())));
        const Kernel back = otf2psf(otf, size);
        for (std::size_t i = 0; i < k.weights().size(); ++i)
          inverse = std::max(inverse, std::abs(back.weights()[i] - k.weights()[i]));
      }
    }
  }
  Outcome o;
  o.pass = roundtrip <= 1e-10 && delta <= 1e-12 && dc <= 1e-12 && inverse <= 1e-10;
  o.detail = "roundtrip " + fmt("%.1e", roundtrip) + ", delta " + fmt("%.1e", delta) + ", dc " +
             fmt("%.1e", dc) + ", inverse " + fmt("%.1e", inverse);
  return o;
}

Outcome fft_size_oracle() {
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 4096; ++n) mismatches += opt_fft_size(n) != oracle::next_7_smooth(n);
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over n <= 4096"};
}

Outcome convolution_equivalence() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t ks = 1 + 2 * std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    std::uniform_int_distribution<std::size_t> side(ks, 64);
    const std::size_t h = side(rng), w = side(rng);
    const ImagePlane p = oracle::random_plane(h, w, rng(), -1.0, 1.0);
    const Kernel k = oracle::random_kernel(ks, rng());
    const FrequencyPlane fp = fft2(p), otf = psf2otf(k, h, w);
    FrequencyPlane prod(h, w);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = fp[i] * otf[i];
    worst = std::max(worst, rel_rms(convolve_circular(p, k), ifft2_real(prod)));
  }
  return {worst <= 1e-8, "worst relative RMS " + fmt("%.1e", worst) + " over 200 instances"};
}

Outcome psf_oracle() {
  double worst = 0.0;
  const double regs[] = {1e-3, 1e-1, DeblurParams{}.psf_reg};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImagePlane s = oracle::random_plane(16, 16, seed + 500);
    ImagePlane b = oracle::convolve(s, oracle::random_kernel(3, seed + 600));
    const ImagePlane noise = oracle::random_plane(16, 16, seed + 700, -0.05, 0.05);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += noise[i];
    const GradientField gs = gradients(s), gb = gradients(b);
    const double reg = regs[seed % 3];
    const Kernel fast = estimate_psf(gb.gx, gb.gy, gs.gx, gs.gy, reg, 3);
    const Kernel dense = oracle::dense_psf(gb.gx, gb.gy, gs.gx, gs.gy, reg, 3);
    worst = std::max(worst, oracle::rms_diff({fast.weights().begin(), fast.weights().end()},
                                             {dense.weights().begin(), dense.weights().end()}));
  }
  return {worst <= 1e-6, "worst RMS vs dense solve " + fmt("%.1e", worst) + " over 20 seeds"};
}

Outcome latent_optimality() {
  std::size_t violations = 0, checks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed + 900);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    const ImagePlane b = oracle::random_plane(8, 8, seed + 1000);
    const Kernel k = oracle::random_kernel(3 + 2 * (seed % 2), seed + 1100);
    const ImagePlane s0 = oracle::random_plane(8, 8, seed + 1200);
    const double alpha = u(rng), beta = u(rng), mu = u(rng);
    const FtrTarget ftr = make_ftr_target(s0, mu, alpha, 0.01);
    const GradientField g = hard_threshold_gradients(s0, 0.01, beta);
    const ImagePlane s = update_latent(b, k, g, ftr, alpha, beta, mu);
    const auto energy = [&](const ImagePlane& x) {
      return oracle::latent_energy(x, b, k, g, ftr.target, ftr.active, alpha, beta, mu);
    };
    const double best = energy(s);
    ++checks;
    violations += best > energy(b) * (1 + 1e-12);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      ImagePlane p = s;
      const double scale = std::pow(10.0, -1.0 - double(trial % 4));
      for (auto& v : p.data()) v += scale * n(rng);
      ++checks;
      violations += best > energy(p) * (1 + 1e-12);
    }
  }
  return {violations == 0, std::to_string(violations) + " of " + std::to_string(checks) +
                               " comparisons beat the solver output"};
}

Outcome adm_descent() {
  std::size_t increases = 0;
  double worst_rise = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImagePlane y = oracle::random_plane(12 + seed, 30 - seed / 2, seed + 1300);
    const Kernel k = oracle::random_kernel(3 + 2 * (seed % 4), seed + 1400);
    AdmTrace trace;
    deblur_adm_aniso(y, k, 0.005 + 0.01 * double(seed % 5), {}, &trace);
    for (std::size_t i = 1; i < trace.objective.size(); ++i) {
      worst_rise = std::max(worst_rise, trace.objective[i] - trace.objective[i - 1]);
      increases += trace.objective[i] > trace.objective[i - 1] + 1e-8;
    }
  }
  double worst_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ImagePlane y = oracle::random_plane(16, 16, seed + 1500);
    const Kernel k = oracle::random_kernel(3 + 2 * (seed % 3), seed + 1600);
    const double lambda = 0.01 + 0.02 * double(seed % 4);
    const double adm = tv_objective(deblur_adm_aniso(y, k, lambda), y, k, lambda);
    const double ref = oracle::tv_energy(oracle::fista_tv(y, k, lambda, 3000, 60), y, k, lambda);
    worst_gap = std::max(worst_gap, adm / ref - 1.0);
  }
  return {increases == 0 && worst_gap <= 0.01,
          std::to_string(increases) + " sweep increases (largest rise " + fmt("%+.1e", worst_rise) +
              "), worst gap to oracle " + fmt("%.3f%%", 100.0 * worst_gap)};
}

Outcome nonblind_gain() {
  const ImageTensor sharp = cameraman();
  Outcome o;
  double slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Kernel k = synth_motion_kernel(15, 16, seed);
    const ImageTensor blurred = degrade(sharp, k, 0.01, seed);
    const auto t0 = std::chrono::steady_clock::now();
    const ImageTensor restored = restore_nonblind(blurred, k, DeblurParams{});
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    const QualityScore before = quality(sharp, blurred), after = quality(sharp, restored);
    const double dp = after.psnr_db - before.psnr_db, ds = after.ssim - before.ssim;
    o.pass = o.pass && dp >= 2.0 && ds >= 0.05;
    o.detail += (seed > 1 ? ", " : "") + fmt("%+.2f dB", dp) + fmt("/%+.3f", ds);
  }
  o.pass = o.pass && slowest < 60.0;
  o.detail = "seeds 1-5 gains " + o.detail + "; slowest image " + fmt("%.1f s", slowest);
  return o;
}

Outcome blind_recovery() {
  const ImageTensor sharp = cameraman();
  DeblurParams p;
  p.xk_iter = 5;
  int passed = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Kernel k = synth_motion_kernel(15, 16, seed);
    const ImageTensor blurred = degrade(sharp, k, 0.01, seed);
    const BlindRestoration r = restore_blind(blurred, p);
    const double sim = kernel_similarity(r.estimate.kernel, k);
    const double pb = psnr(sharp, blurred), pr = psnr(sharp, r.restored);
    const bool ok = sim >= 0.6 && pr >= pb;
    passed += ok;
    detail += (seed > 1 ? ", " : "") + fmt("sim %.3f", sim) + fmt(" %.2f", pb) + fmt("->%.2f dB", pr) +
              (ok ? "" : " (miss)");
  }
  return {passed >= 4, std::to_string(passed) + "/5 seeds: " + detail};
}

ImageTensor natural_720p() {
  const ImagePlane cam = cameraman()[0];
  std::vector<ImagePlane> planes;
  for (int c = 0; c < 3; ++c) {
    ImagePlane p(720, 1280);
    for (std::size_t r = 0; r < 720; ++r)
      for (std::size_t q = 0; q < 1280; ++q) {
        // Mirrored tiling keeps the content continuous across tile borders.
        const std::size_t tr = r / 256, tq = q / 256;
        const std::size_t rr = tr % 2 ? 255 - r % 256 : r % 256, qq = tq % 2 ? 255 - q % 256 : q % 256;
        p(r, q) = std::pow(cam(rr, qq), 0.8 + 0.2 * c);
      }
    planes.push_back(std::move(p));
  }
  return ImageTensor(std::move(planes));
}

Outcome runtime_smoke() {
  const Kernel k = synth_motion_kernel(15, 16, 1);
  const ImageTensor blurred = degrade(natural_720p(), k, 0.01, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const ImageTensor restored = restore_nonblind(blurred, k, DeblurParams{});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double gb = double(peak_rss_bytes()) / (1024.0 * 1024.0 * 1024.0);
  return {seconds < 90.0 && gb < 4.0 && restored.channels() == 3,
          "1280x720 RGB in " + fmt("%.1f s", seconds) + ", peak RSS " + fmt("%.2f GiB", gb) + " on " +
              std::to_string(max_threads()) + " thread(s)"};
}

Outcome metrics_closed_forms() {
  const auto flat = [](std::size_t h, std::size_t w, double v, std::size_t ch = 1) {
    return ImageTensor(std::vector<ImagePlane>(ch, ImagePlane(h, w, v)));
  };
  const auto round4 = [](double v) { return std::round(v * 1e4) / 1e4; };
  bool ok = true;
  ok &= round4(psnr(flat(16, 16, 0.0), flat(16, 16, 0.1))) == 20.0;
  ok &= round4(psnr(flat(16, 16, 0.2, 3), flat(16, 16, 0.21, 3))) == 40.0;
  ok &= round4(psnr(flat(9, 7, 0.0), flat(9, 7, 0.5))) == round4(20.0 * std::log10(2.0));
  ok &= round4(psnr(flat(8, 8, 0.0), flat(8, 8, 1.0))) == 0.0;
  ok &= psnr(flat(8, 8, 0.3), flat(8, 8, 0.3)) == kPsnrInfinite;

  const ImageTensor cam = cameraman();
  const ImageTensor rnd(oracle::random_plane(40, 52, 7));
  const double self = std::max(std::abs(ssim(cam, cam) - 1.0), std::abs(ssim(rnd, rnd) - 1.0));
  double two_const = 0.0;
  for (auto [a, b] : {std::pair{0.2, 0.8}, {0.0, 0.5}, {0.9, 0.3}, {0.45, 0.55}}) {
    const double c1 = 1e-4, c2 = 9e-4;
    const double expected = (2 * a * b + c1) * c2 / ((a * a + b * b + c1) * c2);
    two_const = std::max(two_const, std::abs(ssim(flat(20, 24, a), flat(20, 24, b)) - expected));
  }
  return {ok && self <= 1e-9 && two_const <= 1e-6,
          std::string("psnr cases ") + (ok ? "exact" : "WRONG") + ", |ssim(a,a)-1| " + fmt("%.1e", self) +
              ", two-constant error " + fmt("%.1e", two_const)};
}

std::string metric_columns(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string cell;
    for (int col = 0; col < 6 && std::getline(ls, cell, ','); ++col) out += cell + ",";
    out += "\n";
  }
  return out;
}

Outcome bench_determinism() {
  TempDir dir;
  io::write_image(dir / "sharp.png", cameraman(), 8);
  std::ofstream(dir / "nonblind.json") << R"({"mode": "nonblind", "csv": "nb.csv", "cases": [
      {"id": "a", "sharp": "sharp.png", "kernel": {"size": 15, "steps": 16, "seed": 1}, "seed": 1},
      {"id": "b", "sharp": "sharp.png", "kernel": {"size": 11, "steps": 10}, "noise_sigma": 0.02}]})";
  std::ofstream(dir / "blind.json") << R"({"mode": "blind", "csv": "b.csv", "cases": [
      {"id": "c", "sharp": "sharp.png", "kernel": {"size": 15, "steps": 16, "seed": 2}, "seed": 2}]})";
  std::string first, second;
  for (std::string* dst : {&first, &second}) {
    for (const char* name : {"nonblind.json", "blind.json"}) {
      std::ostringstream out, err;
      if (cli::run({"bench", (dir / name).string(), "--seed", "5"}, out, err) != 0)
        return {false, "bench failed: " + err.str()};
    }
    std::stringstream ss;
    ss << std::ifstream(dir / "nb.csv").rdbuf() << std::ifstream(dir / "b.csv").rdbuf();
    *dst = ss.str();
  }
  const std::string a = metric_columns(first), b = metric_columns(second);
  const auto rows = std::count(a.begin(), a.end(), '\n') - 2;
  return {a == b && rows == 3, std::to_string(rows) + " rows, metric columns " +
                                   (a == b ? "bit-identical" : "DIFFER")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"spectral identities", 5, spectral_identities},
      {"opt_fft_size brute force", 1, fft_size_oracle},
      {"spatial/spectral convolution", 10, convolution_equivalence},
      {"estimate_psf dense oracle", 30, psf_oracle},
      {"update_latent optimality", 10, latent_optimality},
      {"ADM descent and optimality", 60, adm_descent},
      {"non-blind synthetic gain", 300, nonblind_gain},
      {"blind recovery", 300, blind_recovery},
      {"720p runtime smoke", 1e9, runtime_smoke},
      {"metrics closed forms", 1e9, metrics_closed_forms},
      {"bench determinism", 1e9, bench_determinism},
  };
  int failures = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds >= c.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f s", c.limit_seconds) + " budget";
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
