#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fftdeblur/core.hpp"
#include "fftdeblur/params.hpp"

namespace fftdeblur {

struct SyntheticKernel {
  std::size_t size = 15;
  int steps = 16;
  std::uint64_t seed = 0;
};

struct BenchCase {
  std::string id;
  std::filesystem::path sharp_path;
  std::variant<SyntheticKernel, std::filesystem::path> kernel;
  double noise_sigma = 0.01;
  std::uint64_t seed = 0;
};

enum class BenchMode { Blind, NonBlind };

struct BenchRow {
  std::string case_id;
  double psnr_blurred = 0.0;
  double psnr_restored = 0.0;
  double ssim_blurred = 0.0;
  double ssim_restored = 0.0;
  std::optional<double> kernel_sim;  // blind runs only
  double wall_seconds = 0.0;
  std::size_t peak_rss_bytes = 0;
  std::string error;  // non-empty when the case failed

  bool ok() const noexcept { return error.empty(); }
};

// Arithmetic means over the successful rows (all zero for an empty report).
struct BenchAggregate {
  std::size_t cases = 0;
  double psnr_blurred = 0.0;
  double psnr_restored = 0.0;
  double ssim_blurred = 0.0;
  double ssim_restored = 0.0;
  std::optional<double> kernel_sim;
  double wall_seconds = 0.0;
  double peak_rss_bytes = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  BenchAggregate aggregate;
};

// Seeded random-walk camera-shake trajectory of `steps` samples one pixel
// apart, bilinearly splatted onto a size x size grid and normalized.
Kernel synth_motion_kernel(std::size_t size, int steps, std::uint64_t seed);

// Per-channel circular blur plus seeded i.i.d. Gaussian noise, clipped to [0,1].
ImageTensor degrade(const ImageTensor& sharp, const Kernel& k, double noise_sigma, std::uint64_t seed);

BenchAggregate aggregate_rows(const std::vector<BenchRow>& rows);

// Degrade, restore and score every case. Only the restoration stage is timed.
// Cases that fail to load are reported with `error` set.
BenchReport run_benchmark(const std::vector<BenchCase>& cases, const DeblurParams& params,
                          BenchMode mode);

// CSV with header case_id,psnr_blurred,psnr_restored,ssim_blurred,ssim_restored,
// kernel_sim,wall_seconds,peak_rss_bytes.
std::string report_csv(const BenchReport& report);
nlohmann::json report_json(const BenchReport& report);

// Process peak resident set size in bytes.
std::size_t peak_rss_bytes();

}  // namespace fftdeblur
