#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fftdeblur/bench.hpp"
#include "fftdeblur/error.hpp"
#include "fftdeblur/params.hpp"

namespace fftdeblur::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kValidationError = 2,
  kEstimationCollapse = 3,
  kShapeError = 4,
};

ExitCode exit_code_for(Errc code) noexcept;

// Overlays the keys present in `config` onto `params`. Unknown keys throw
// InvalidParameter.
void apply_param_json(const nlohmann::json& config, DeblurParams& params);

struct BenchConfig {
  std::vector<BenchCase> cases;
  BenchMode mode = BenchMode::NonBlind;
  DeblurParams params;
  std::string csv_path;
  std::string json_path;
};

// Parses a bench configuration; relative paths resolve against base_dir. The
// file's "params" object is applied on top of `defaults`; cases without a
// "seed" use default_seed.
BenchConfig parse_bench_config(const nlohmann::json& config, const std::string& base_dir,
                               const DeblurParams& defaults = {}, std::uint64_t default_seed = 0);

// Entry point for the fftdeblur executable. Writes diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fftdeblur::cli
