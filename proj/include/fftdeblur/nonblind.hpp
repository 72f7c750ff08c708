#pragma once

#include <vector>

#include "fftdeblur/core.hpp"

namespace fftdeblur {

// Penalty schedule for the anisotropic-TV ADM solver. rho starts at rho0 and is
// multiplied by rho_growth after each sweep. Within a sweep the objective is
// evaluated every check_interval steps; the sweep ends once the relative
// decrease since the previous evaluation is at most `tolerance` and the
// objective is no higher than at the end of the previous sweep, or after
// max_inner_iterations steps.
struct AdmOptions {
  double rho0 = 1.0;
  double rho_growth = 2.0;
  int sweeps = 5;
  double tolerance = 1e-4;
  int check_interval = 10;
  int max_inner_iterations = 200;
};

// Per-sweep record: objective at the end of the sweep and steps taken.
struct AdmTrace {
  std::vector<double> objective;
  std::vector<int> iterations;
};

struct RingingConfig {
  double lambda_tv = 1e-3;
  double lambda_l0 = 1e-3;
  double weight_ring = 1.0;
  double bilateral_spatial = 3.0;  // Gaussian sigma; window radius ceil(3 sigma)
  double bilateral_range = 0.1;
  double l0_kappa = 2.0;
  double l0_beta_max = 1e5;
  AdmOptions adm;
};

// argmin_x 1/2 |x (x) k - y|^2 + lambda_tv (|Dx x|_1 + |Dy x|_1) by ADM.
ImagePlane deblur_adm_aniso(const ImagePlane& y, const Kernel& k, double lambda_tv,
                            const AdmOptions& options = {}, AdmTrace* trace = nullptr);

// Objective minimized by deblur_adm_aniso.
double tv_objective(const ImagePlane& x, const ImagePlane& y, const Kernel& k, double lambda_tv);

// Half-quadratic L0 gradient minimization: beta from 2 lambda_l0 to beta_max by kappa.
ImagePlane l0_restoration(const ImagePlane& y, const Kernel& k, double lambda_l0, double kappa,
                          double beta_max = 1e5);

// Per-channel bilateral filter, window radius ceil(3 sigma_spatial), replicate boundary.
ImageTensor bilateral_filter(const ImageTensor& x, double sigma_spatial, double sigma_range);
ImagePlane bilateral_filter(const ImagePlane& x, double sigma_spatial, double sigma_range);

// TV deconvolution per channel, optionally corrected by the bilateral-filtered
// TV - L0 difference scaled by weight_ring.
ImageTensor remove_ringing(const ImageTensor& y, const Kernel& k, const RingingConfig& cfg);

}  // namespace fftdeblur
