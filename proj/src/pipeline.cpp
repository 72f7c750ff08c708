#include "fftdeblur/pipeline.hpp"

namespace fftdeblur {

RingingConfig ringing_config(const DeblurParams& params) {
  RingingConfig cfg;
  cfg.lambda_tv = params.lambda_tv;
  cfg.lambda_l0 = params.lambda_l0;
  cfg.weight_ring = params.weight_ring;
  return cfg;
}

BlindRestoration restore_blind(const ImageTensor& blurred, const DeblurParams& params,
                               const std::optional<Kernel>& k0) {
  params.validate();
  const Kernel initial = k0 ? *k0 : Kernel::uniform(params.kernel_size);
  BlindResult estimate = blind_deconvolve(luminance(blurred), initial, params);
  ImageTensor restored = remove_ringing(blurred, estimate.kernel, ringing_config(params));
  return {std::move(restored), std::move(estimate)};
}

ImageTensor restore_nonblind(const ImageTensor& blurred, const Kernel& k, const DeblurParams& params) {
  params.validate();
  return remove_ringing(blurred, k, ringing_config(params));
}

}  // namespace fftdeblur
