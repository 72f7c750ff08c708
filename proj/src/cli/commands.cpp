#include "fftdeblur/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "fftdeblur/io.hpp"
#include "fftdeblur/metrics.hpp"
#include "fftdeblur/parallel.hpp"
#include "fftdeblur/pipeline.hpp"

namespace fftdeblur::cli {

namespace fs = std::filesystem;

ExitCode exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::Io: return kIoError;
    case Errc::InvalidParameter:
    case Errc::DimensionMismatch:
    case Errc::ImageTooSmall: return kValidationError;
    case Errc::DegenerateKernel:
    case Errc::AllZeroGradients:
    case Errc::EmptyKernel:
    case Errc::NonFiniteState: return kEstimationCollapse;
    case Errc::KernelTooLarge:
    case Errc::PadTooSmall: return kShapeError;
  }
  return kValidationError;
}

void apply_param_json(const nlohmann::json& config, DeblurParams& p) {
  if (!config.is_object()) throw Error(Errc::InvalidParameter, "parameter config must be an object");
  for (const auto& [key, value] : config.items()) {
    try {
      if (key == "lambda_ftr") p.lambda_ftr = value.get<double>();
      else if (key == "lambda_grad") p.lambda_grad = value.get<double>();
      else if (key == "lambda_tv") p.lambda_tv = value.get<double>();
      else if (key == "lambda_l0") p.lambda_l0 = value.get<double>();
      else if (key == "weight_ring") p.weight_ring = value.get<double>();
      else if (key == "kappa") p.kappa = value.get<double>();
      else if (key == "xk_iter") p.xk_iter = value.get<int>();
      else if (key == "threshold") p.threshold = value.get<double>();
      else if (key == "kernel_size") {
        const auto v = value.get<long long>();
        if (v < 1) throw Error(Errc::InvalidParameter, "invalid value for kernel_size");
        p.kernel_size = std::size_t(v);
      }
      else if (key == "psf_reg") p.psf_reg = value.get<double>();
      else if (key == "alpha_max") p.alpha_max = value.get<double>();
      else if (key == "beta_max") p.beta_max = value.get<double>();
      else if (key == "mu") p.mu = value.get<double>();
      else if (key == "decay") p.decay = value.get<double>();
      else throw Error(Errc::InvalidParameter, "unknown parameter '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw Error(Errc::InvalidParameter, "invalid value for " + key);
    }
  }
}

namespace {

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidParameter, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

fs::path resolve(const std::string& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : fs::path(base) / path;
}

// Command-line overrides for DeblurParams; unset options leave the value alone.
struct ParamFlags {
  std::optional<double> lambda_ftr, lambda_grad, lambda_tv, lambda_l0, weight_ring, kappa,
      threshold, psf_reg, mu, decay;
  std::optional<int> xk_iter;
  std::optional<long long> kernel_size;
  std::optional<std::uint64_t> seed;
  std::string config;

  void attach(CLI::App& app) {
    app.add_option("--lambda-ftr", lambda_ftr, "FFT-ReLU prior weight");
    app.add_option("--lambda-grad", lambda_grad, "L0 gradient weight for latent estimation");
    app.add_option("--lambda-tv", lambda_tv, "anisotropic TV weight");
    app.add_option("--lambda-l0", lambda_l0, "L0 weight of the ringing branch");
    app.add_option("--weight-ring", weight_ring, "ringing suppression weight (0 disables)");
    app.add_option("--kappa", kappa, "continuation multiplier (> 1)");
    app.add_option("--xk-iter", xk_iter, "outer blind iterations");
    app.add_option("--kernel-size", kernel_size, "odd kernel side length");
    app.add_option("--psf-reg", psf_reg, "Tikhonov weight of the kernel solve");
    app.add_option("--threshold", threshold, "initial gradient selection threshold");
    app.add_option("--mu", mu, "FFT-ReLU threshold scale");
    app.add_option("--decay", decay, "per-iteration lambda divisor (> 1)");
    app.add_option("--seed", seed, "seed for stochastic steps");
    app.add_option("--config", config, "JSON file of parameter defaults (flags win)");
  }

  DeblurParams resolve(DeblurParams p) const {
    if (!config.empty()) {
      nlohmann::json j = read_json_file(config);
      if (j.contains("params")) j = j["params"];
      apply_param_json(j, p);
    }
    if (lambda_ftr) p.lambda_ftr = *lambda_ftr;
    if (lambda_grad) p.lambda_grad = *lambda_grad;
    if (lambda_tv) p.lambda_tv = *lambda_tv;
    if (lambda_l0) p.lambda_l0 = *lambda_l0;
    if (weight_ring) p.weight_ring = *weight_ring;
    if (kappa) p.kappa = *kappa;
    if (xk_iter) p.xk_iter = *xk_iter;
    if (kernel_size) {
      if (*kernel_size < 1) throw Error(Errc::InvalidParameter, "invalid value for kernel_size");
      p.kernel_size = std::size_t(*kernel_size);
    }
    if (psf_reg) p.psf_reg = *psf_reg;
    if (threshold) p.threshold = *threshold;
    if (mu) p.mu = *mu;
    if (decay) p.decay = *decay;
    return p;
  }
};

// Rewrites "invalid value for lambda_tv" into a message naming the flag.
void validate_as_flags(const DeblurParams& p) {
  try {
    p.validate();
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string marker = "invalid value for ";
    if (const auto pos = msg.find(marker); pos != std::string::npos) {
      std::string field = msg.substr(pos + marker.size());
      for (auto& ch : field)
        if (ch == '_') ch = '-';
      throw Error(Errc::InvalidParameter, "invalid value for --" + field);
    }
    throw;
  }
}

int output_depth(int input_depth, const fs::path& output) {
  if (input_depth == 8 || input_depth == 16) return input_depth;
  const std::string ext = output.extension().string();
  return (ext == ".pfm" || ext == ".tif" || ext == ".tiff") ? 32 : 16;
}

std::string format_fixed(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct BlindArgs {
  std::string input, output, kernel_text, kernel_image;
};

int cmd_blind(const BlindArgs& a, const DeblurParams& params, std::ostream& out) {
  const auto loaded = io::read_image(a.input);
  const auto restored = restore_blind(loaded.image, params);

  const std::string text_path = a.kernel_text.empty() ? a.output + ".kernel.txt" : a.kernel_text;
  const std::string png_path = a.kernel_image.empty() ? a.output + ".kernel.png" : a.kernel_image;
  io::StagedOutputs staged;
  io::write_image(staged.stage(a.output), restored.restored, output_depth(loaded.bit_depth, a.output));
  io::write_kernel_text(staged.stage(text_path), restored.estimate.kernel);
  io::write_kernel_image(staged.stage(png_path), restored.estimate.kernel);
  staged.commit();
  out << "kernel=" << text_path << " iterations=" << restored.estimate.iterations_run << '\n';
  return kOk;
}

struct NonblindArgs {
  std::string input, kernel, output;
};

int cmd_nonblind(const NonblindArgs& a, const DeblurParams& params) {
  const auto loaded = io::read_image(a.input);
  const Kernel k = io::read_kernel(a.kernel);
  const ImageTensor restored = restore_nonblind(loaded.image, k, params);
  io::StagedOutputs staged;
  io::write_image(staged.stage(a.output), restored, output_depth(loaded.bit_depth, a.output));
  staged.commit();
  return kOk;
}

int cmd_metrics(const std::string& a, const std::string& b, double peak, std::ostream& out) {
  const auto ia = io::read_image(a).image;
  const auto ib = io::read_image(b).image;
  if (!ia.same_shape(ib)) throw Error(Errc::DimensionMismatch, "images differ in shape");
  const QualityScore q = quality(ia, ib, peak);
  out << "psnr_db=" << format_fixed(q.psnr_db) << " ssim=" << format_fixed(q.ssim) << '\n';
  return kOk;
}

int cmd_bench(const std::string& config_path, const ParamFlags& flags, std::ostream& out) {
  const nlohmann::json config = read_json_file(config_path);
  // Precedence: built-in defaults < --config file < bench file "params" < flags.
  ParamFlags file_only;
  file_only.config = flags.config;
  const DeblurParams defaults = file_only.resolve({});
  BenchConfig bench = parse_bench_config(config, fs::path(config_path).parent_path().string(),
                                         defaults, flags.seed.value_or(0));
  ParamFlags overrides = flags;
  overrides.config.clear();
  bench.params = overrides.resolve(bench.params);
  validate_as_flags(bench.params);

  const BenchReport report = run_benchmark(bench.cases, bench.params, bench.mode);
  io::StagedOutputs staged;
  if (!bench.csv_path.empty()) {
    std::ofstream f(staged.stage(bench.csv_path));
    f << report_csv(report);
    if (!f) throw Error(Errc::Io, "cannot write " + bench.csv_path);
  }
  if (!bench.json_path.empty()) {
    std::ofstream f(staged.stage(bench.json_path));
    f << report_json(report).dump(2) << '\n';
    if (!f) throw Error(Errc::Io, "cannot write " + bench.json_path);
  }
  staged.commit();
  const auto& agg = report.aggregate;
  out << "cases=" << agg.cases << " psnr_blurred=" << format_fixed(agg.psnr_blurred)
      << " psnr_restored=" << format_fixed(agg.psnr_restored) << '\n';
  for (const auto& row : report.rows)
    if (!row.ok()) out << "case " << row.case_id << " failed: " << row.error << '\n';
  return kOk;
}

void apply_thread_env() {
  if (const char* env = std::getenv("FFTDEBLUR_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n >= 0) set_max_threads(unsigned(n));
  }
}

}  // namespace

BenchConfig parse_bench_config(const nlohmann::json& config, const std::string& base_dir,
                               const DeblurParams& defaults, std::uint64_t default_seed) {
  BenchConfig out;
  out.params = defaults;
  try {
    const std::string mode = config.value("mode", std::string("nonblind"));
    if (mode == "blind") out.mode = BenchMode::Blind;
    else if (mode == "nonblind") out.mode = BenchMode::NonBlind;
    else throw Error(Errc::InvalidParameter, "mode must be 'blind' or 'nonblind'");

    if (config.contains("params")) apply_param_json(config["params"], out.params);
    if (config.contains("csv")) out.csv_path = resolve(base_dir, config["csv"].get<std::string>()).string();
    if (config.contains("json")) out.json_path = resolve(base_dir, config["json"].get<std::string>()).string();

    const auto cases = config.value("cases", nlohmann::json::array());
    std::size_t index = 0;
    for (const auto& c : cases) {
      BenchCase bc;
      bc.id = c.value("id", "case" + std::to_string(index++));
      bc.sharp_path = resolve(base_dir, c.at("sharp").get<std::string>());
      bc.noise_sigma = c.value("noise_sigma", 0.01);
      bc.seed = c.value("seed", default_seed);
      const auto& kernel = c.at("kernel");
      if (kernel.is_string()) {
        bc.kernel = resolve(base_dir, kernel.get<std::string>());
      } else {
        SyntheticKernel s;
        s.size = kernel.value("size", std::size_t{15});
        s.steps = kernel.value("steps", 16);
        s.seed = kernel.value("seed", bc.seed);
        bc.kernel = s;
      }
      out.cases.push_back(std::move(bc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidParameter, std::string("malformed bench config: ") + e.what());
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  apply_thread_env();

  CLI::App app{"Frequency-domain blind and non-blind image deblurring", "fftdeblur"};
  app.require_subcommand(1);

  ParamFlags blind_flags, nonblind_flags, bench_flags;
  BlindArgs blind_args;
  auto* blind = app.add_subcommand("blind", "estimate the blur kernel and restore the image");
  blind->add_option("--input", blind_args.input, "blurred (or externally preprocessed) image")->required();
  blind->add_option("--output", blind_args.output, "restored image path")->required();
  blind->add_option("--kernel-out", blind_args.kernel_text, "kernel text file (default <output>.kernel.txt)");
  blind->add_option("--kernel-image", blind_args.kernel_image, "kernel PNG (default <output>.kernel.png)");
  blind_flags.attach(*blind);

  NonblindArgs nonblind_args;
  auto* nonblind = app.add_subcommand("nonblind", "restore with a known kernel");
  nonblind->add_option("--input", nonblind_args.input, "blurred image")->required();
  nonblind->add_option("--kernel", nonblind_args.kernel, "kernel text file or grayscale image")->required();
  nonblind->add_option("--output", nonblind_args.output, "restored image path")->required();
  nonblind_flags.attach(*nonblind);

  std::string metrics_a, metrics_b;
  double peak = 1.0;
  auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM between two images");
  metrics->add_option("image_a", metrics_a)->required();
  metrics->add_option("image_b", metrics_b)->required();
  metrics->add_option("--peak", peak, "peak signal value on the [0,1] scale");

  std::string bench_config;
  auto* bench = app.add_subcommand("bench", "run a synthetic benchmark described by a JSON file");
  bench->add_option("config_json", bench_config)->required();
  bench_flags.attach(*bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (blind->parsed()) {
      const DeblurParams p = blind_flags.resolve({});
      validate_as_flags(p);
      return cmd_blind(blind_args, p, out);
    }
    if (nonblind->parsed()) {
      const DeblurParams p = nonblind_flags.resolve({});
      validate_as_flags(p);
      return cmd_nonblind(nonblind_args, p);
    }
    if (metrics->parsed()) {
      if (!(peak > 0.0)) throw Error(Errc::InvalidParameter, "invalid value for --peak");
      return cmd_metrics(metrics_a, metrics_b, peak, out);
    }
    if (bench->parsed()) return cmd_bench(bench_config, bench_flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kValidationError;
}

}  // namespace fftdeblur::cli
