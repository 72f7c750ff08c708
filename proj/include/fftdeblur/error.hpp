#pragma once

#include <stdexcept>
#include <string>

namespace fftdeblur {

enum class Errc {
  KernelTooLarge,
  PadTooSmall,
  DegenerateKernel,
  AllZeroGradients,
  EmptyKernel,
  NonFiniteState,
  DimensionMismatch,
  ImageTooSmall,
  InvalidParameter,
  Io,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fftdeblur
