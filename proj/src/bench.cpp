#include "fftdeblur/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "fftdeblur/io.hpp"
#include "fftdeblur/metrics.hpp"
#include "fftdeblur/pipeline.hpp"

namespace fftdeblur {

Kernel synth_motion_kernel(std::size_t size, int steps, std::uint64_t seed) {
  if (size < 3 || size % 2 == 0)
    throw Error(Errc::InvalidParameter, "synthetic kernel size must be odd and >= 3");
  if (steps < 1) throw Error(Errc::InvalidParameter, "synthetic kernel needs at least one step");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> heading(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> turn(0.0, 0.35);

  std::vector<double> xs{0.0}, ys{0.0};
  double angle = heading(rng);
  for (int t = 1; t < steps; ++t) {
    angle += turn(rng);
    xs.push_back(xs.back() + std::cos(angle));
    ys.push_back(ys.back() + std::sin(angle));
  }
  // Center the trajectory on its centroid, then keep it inside the window.
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(ys.size());
  const double half = double(size / 2);

  Kernel k(size);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::clamp(xs[i] - mx, -half, half) + half;
    const double y = std::clamp(ys[i] - my, -half, half) + half;
    const double x0 = std::floor(x), y0 = std::floor(y);
    const double fx = x - x0, fy = y - y0;
    const auto splat = [&](double row, double col, double weight) {
      if (weight <= 0.0) return;
      k(std::size_t(row), std::size_t(col)) += weight;
    };
    splat(y0, x0, (1 - fx) * (1 - fy));
    splat(y0, x0 + 1, fx * (1 - fy));
    splat(y0 + 1, x0, (1 - fx) * fy);
    splat(y0 + 1, x0 + 1, fx * fy);
  }
  const double total = k.sum();
  for (auto& v : k.weights()) v /= total;
  return k;
}

ImageTensor degrade(const ImageTensor& sharp, const Kernel& k, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw Error(Errc::InvalidParameter, "noise sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  std::vector<ImagePlane> channels;
  for (const auto& plane : sharp) {
    ImagePlane out = convolve_circular(plane, k);
    if (noise_sigma > 0.0)
      for (auto& v : out.data()) v = std::clamp(v + noise(rng), 0.0, 1.0);
    else
      for (auto& v : out.data()) v = std::clamp(v, 0.0, 1.0);
    channels.push_back(std::move(out));
  }
  return ImageTensor(std::move(channels));
}

std::size_t peak_rss_bytes() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return std::size_t(usage.ru_maxrss) * 1024;  // Linux reports kilobytes
}

BenchAggregate aggregate_rows(const std::vector<BenchRow>& rows) {
  BenchAggregate agg;
  double sim_total = 0.0;
  std::size_t sim_count = 0;
  for (const auto& row : rows) {
    if (!row.ok()) continue;
    ++agg.cases;
    agg.psnr_blurred += row.psnr_blurred;
    agg.psnr_restored += row.psnr_restored;
    agg.ssim_blurred += row.ssim_blurred;
    agg.ssim_restored += row.ssim_restored;
    agg.wall_seconds += row.wall_seconds;
    agg.peak_rss_bytes += double(row.peak_rss_bytes);
    if (row.kernel_sim) {
      sim_total += *row.kernel_sim;
      ++sim_count;
    }
  }
  if (agg.cases > 0) {
    const double n = double(agg.cases);
    agg.psnr_blurred /= n;
    agg.psnr_restored /= n;
    agg.ssim_blurred /= n;
    agg.ssim_restored /= n;
    agg.wall_seconds /= n;
    agg.peak_rss_bytes /= n;
  }
  if (sim_count > 0) agg.kernel_sim = sim_total / double(sim_count);
  return agg;
}

BenchReport run_benchmark(const std::vector<BenchCase>& cases, const DeblurParams& params,
                          BenchMode mode) {
  params.validate();
  BenchReport report;
  for (const auto& bench_case : cases) {
    BenchRow row;
    row.case_id = bench_case.id;
    try {
      const ImageTensor sharp = io::read_image(bench_case.sharp_path).image;
      const Kernel truth = std::holds_alternative<SyntheticKernel>(bench_case.kernel)
                               ? [&] {
                                   const auto& s = std::get<SyntheticKernel>(bench_case.kernel);
                                   return synth_motion_kernel(s.size, s.steps, s.seed);
                                 }()
                               : io::read_kernel(std::get<std::filesystem::path>(bench_case.kernel));
      const ImageTensor blurred = degrade(sharp, truth, bench_case.noise_sigma, bench_case.seed);

      const auto start = std::chrono::steady_clock::now();
      ImageTensor restored;
      if (mode == BenchMode::Blind) {
        auto blind = restore_blind(blurred, params);
        row.kernel_sim = kernel_similarity(blind.estimate.kernel, truth);
        restored = std::move(blind.restored);
      } else {
        restored = restore_nonblind(blurred, truth, params);
      }
      const auto stop = std::chrono::steady_clock::now();
      row.wall_seconds = std::max(std::chrono::duration<double>(stop - start).count(),
                                  std::numeric_limits<double>::min());
      row.peak_rss_bytes = peak_rss_bytes();

      row.psnr_blurred = psnr(sharp, blurred);
      row.psnr_restored = psnr(sharp, restored);
      row.ssim_blurred = ssim(sharp, blurred);
      row.ssim_restored = ssim(sharp, restored);
    } catch (const Error& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  report.aggregate = aggregate_rows(report.rows);
  return report;
}

namespace {

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::string report_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "case_id,psnr_blurred,psnr_restored,ssim_blurred,ssim_restored,kernel_sim,wall_seconds,"
        "peak_rss_bytes\n";
  for (const auto& r : report.rows) {
    os << r.case_id << ',';
    if (r.ok()) {
      os << number(r.psnr_blurred) << ',' << number(r.psnr_restored) << ','
         << number(r.ssim_blurred) << ',' << number(r.ssim_restored) << ','
         << (r.kernel_sim ? number(*r.kernel_sim) : "") << ',' << number(r.wall_seconds) << ','
         << r.peak_rss_bytes;
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json report_json(const BenchReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row{{"case_id", r.case_id}};
    if (r.ok()) {
      row["psnr_blurred"] = json_number(r.psnr_blurred);
      row["psnr_restored"] = json_number(r.psnr_restored);
      row["ssim_blurred"] = r.ssim_blurred;
      row["ssim_restored"] = r.ssim_restored;
      row["kernel_sim"] = r.kernel_sim ? nlohmann::json(*r.kernel_sim) : nlohmann::json(nullptr);
      row["wall_seconds"] = r.wall_seconds;
      row["peak_rss_bytes"] = r.peak_rss_bytes;
    } else {
      row["error"] = r.error;
    }
    rows.push_back(std::move(row));
  }
  const auto& a = report.aggregate;
  return {{"rows", std::move(rows)},
          {"aggregate",
           {{"cases", a.cases},
            {"psnr_blurred", json_number(a.psnr_blurred)},
            {"psnr_restored", json_number(a.psnr_restored)},
            {"ssim_blurred", a.ssim_blurred},
            {"ssim_restored", a.ssim_restored},
            {"kernel_sim", a.kernel_sim ? nlohmann::json(*a.kernel_sim) : nlohmann::json(nullptr)},
            {"wall_seconds", a.wall_seconds},
            {"peak_rss_bytes", a.peak_rss_bytes}}}};
}

}  // namespace fftdeblur
