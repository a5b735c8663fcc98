#pragma once

#include "nehari/io.h"
#include "nehari/solver.h"
#include "nehari/threshold.h"

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace nehari {

/// Malformed or invalid problem configuration. The message names the
/// offending line (syntax errors) or field path (schema errors).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SourceSpec {
  enum class Kind { Constant, Gaussian, Eigen, Csv };
  Kind kind = Kind::Eigen;
  double amplitude = 1.0;  // constant value / gaussian peak / eigen amplitude
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.1;
  std::filesystem::path path;  // csv, resolved against the config directory
};

struct ProblemConfig {
  int dim = 1;
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> points{199, 1};
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double beta = 0.5;
  SourceSpec f;
  SourceSpec g;
  std::optional<double> rho;  // autoscale: max(|f|_{4/3}, |g|_{4/3}) = rho * Lambda
  SolverConfig solver;
  S4Options s4;
  std::filesystem::path output = "out";
};

/// Parses the JSON config text. Unknown keys are errors.
ProblemConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ProblemConfig load_config(const std::filesystem::path& path);
json config_to_json(const ProblemConfig& cfg);

/// Coefficient and autoscale checks. rho must lie in (0,1) unless `force`.
void validate_config(const ProblemConfig& cfg, bool force);

Grid make_grid(const ProblemConfig& cfg);
Field build_source(const SourceSpec& spec, const Grid& grid);

/// Everything a run needs, with autoscaling already applied to the sources.
struct Problem {
  Grid grid;
  Params params;
  S4Estimate s4;
  ThresholdReport threshold;
  double source_scale = 1.0;  // factor applied by autoscale
};

Problem build_problem(const ProblemConfig& cfg);

}  // namespace nehari
