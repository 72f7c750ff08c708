#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fftdeblur/core.hpp"

namespace fftdeblur::io {

struct LoadedImage {
  ImageTensor image;  // RGB order, values scaled to [0,1]
  int bit_depth;      // 8, 16, or 32 (float formats)
};

// Decodes PNG/JPEG/TIFF/PFM. Alpha channels are dropped. Throws Io.
LoadedImage read_image(const std::filesystem::path& path);

// Encodes by extension. bit_depth 8 or 16 quantizes after clipping to [0,1];
// 32 writes float samples (PFM/TIFF only). Throws Io.
void write_image(const std::filesystem::path& path, const ImageTensor& image, int bit_depth);

// Plain-text kernel: one row per line, space-separated decimals.
std::string format_kernel_text(const Kernel& k);
void write_kernel_text(const std::filesystem::path& path, const Kernel& k);
// Grayscale 8-bit image scaled so the largest tap maps to 255.
void write_kernel_image(const std::filesystem::path& path, const Kernel& k);

// Reads a kernel from the text format, or from any image readable by
// read_image (luminance). The result is normalized. Throws Io on decode
// failure and InvalidParameter for non-square or even-sided kernels.
Kernel read_kernel(const std::filesystem::path& path);

// Collects outputs under temporary names and renames them into place on
// commit(); uncommitted temporaries are removed on destruction.
class StagedOutputs {
 public:
  StagedOutputs() = default;
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;
  ~StagedOutputs();

  // Temporary path next to `target` with the same extension.
  std::filesystem::path stage(const std::filesystem::path& target);
  void commit();

 private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
  bool committed_ = false;
};

// Writes text to path via a temporary file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace fftdeblur::io
