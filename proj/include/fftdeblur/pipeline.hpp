#pragma once

#include <optional>

#include "fftdeblur/blind.hpp"
#include "fftdeblur/core.hpp"
#include "fftdeblur/nonblind.hpp"
#include "fftdeblur/params.hpp"

namespace fftdeblur {

RingingConfig ringing_config(const DeblurParams& params);

struct BlindRestoration {
  ImageTensor restored;
  BlindResult estimate;
};

// Kernel estimation on luminance followed by ringing-suppressed restoration of
// every channel. k0 defaults to a uniform kernel of params.kernel_size.
BlindRestoration restore_blind(const ImageTensor& blurred, const DeblurParams& params,
                               const std::optional<Kernel>& k0 = std::nullopt);

ImageTensor restore_nonblind(const ImageTensor& blurred, const Kernel& k, const DeblurParams& params);

}  // namespace fftdeblur
