#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvb/errors.hpp"
#include "mvb/optimizer.hpp"
#include "mvb/sgd_harness.hpp"

namespace mvb {

/// Fully resolved experiment description: the CLI subcommand plus the
/// [model], [data], [optimizer] and [rate] sections of a config file, with
/// defaults filled in and flag overrides applied.  See the README for the
/// config grammar.
struct ExperimentConfig {
  std::string command;  // run-gvb | run-wvb | rate-check | generate-data

  // [model]
  std::string model_kind = "gaussian_cov";  // logistic | garch | gaussian_cov
  double prior_variance = 10.0;             // logistic coefficient prior
  double nu0 = 0.0;            // gaussian_cov prior dof; 0 -> data dimension
  double s0_scale = 0.01;      // gaussian_cov prior scale S0 = s0_scale * I
  std::optional<double> sigma1_sq;  // garch presample variance override

  // [data]: either a CSV path or a synthetic recipe
  std::string data_path;
  std::string synthetic_kind;  // gaussian_cov | garch | logistic
  int rows = 100;
  int dimension = 5;
  double garch_w = 0.05;
  double garch_alpha = 0.85;
  double garch_beta = 0.1;

  // [optimizer] (defaults match OptimizerConfig)
  OptimizerConfig optimizer;

  // [rate]
  std::string rate_family = "nonconvex";  // nonconvex | strongly_convex
  std::string rate_problem = "spd";       // spd | quadratic
  int rate_dimension = 3;
  double rate_curvature = 0.012;
  RateCheckConfig rate;

  // output
  std::string output_dir = ".";
  std::uint64_t seed = 0;
  /// When set, the JSON summary additionally reports wall-clock seconds.
  /// Off by default so identical runs produce byte-identical outputs.
  bool timing = false;
};

/// Optional command-line overrides applied after the file is read.
struct FlagOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> learning_rate;
  std::optional<double> momentum;
  std::optional<int> max_iterations;
  std::optional<std::string> output_dir;
  bool timing = false;
};

/// Parses an INI-style config file ("[section]" headers, "key = value"
/// lines, '#' or ';' comments).  An empty path returns pure defaults.
/// Unknown sections or keys raise ConfigError listing what is valid; value
/// range violations raise ConfigError naming the key and its bound.
ExperimentConfig parse_config_file(const std::string& path);

/// Applies flag overrides (flags win over file values) and re-validates.
void apply_overrides(ExperimentConfig& config, const FlagOverrides& flags);

/// Range- and consistency-checks an assembled config; throws ConfigError
/// naming the offending key.  Called by parse_config_file and
/// apply_overrides; exposed for configs built in code.
void validate_config(const ExperimentConfig& config);

}  // namespace mvb
