#include "mvb/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mvb {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& path, int line,
                       const std::string& message) {
  throw ConfigError("config '" + path + "' line " + std::to_string(line) +
                    ": " + message);
}

double parse_double(const std::string& path, int line, const std::string& key,
                    const std::string& value) {
  double parsed = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(path, line, "value '" + value + "' for key '" + key +
                         "' is not a number");
  }
  return parsed;
}

long long parse_int(const std::string& path, int line, const std::string& key,
                    const std::string& value) {
  long long parsed = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(path, line, "value '" + value + "' for key '" + key +
                         "' is not an integer");
  }
  return parsed;
}

bool parse_bool(const std::string& path, int line, const std::string& key,
                const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(path, line, "value '" + value + "' for key '" + key +
                       "' must be true or false");
}

std::vector<int> parse_int_list(const std::string& path, int line,
                                const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  std::string::size_type start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const std::string token =
        trim(comma == std::string::npos ? value.substr(start)
                                        : value.substr(start, comma - start));
    out.push_back(static_cast<int>(parse_int(path, line, key, token)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

constexpr const char* kModelKeys =
    "kind, prior_variance, nu0, s0_scale, sigma1_sq";
constexpr const char* kDataKeys =
    "path, synthetic, rows, dimension, garch_w, garch_alpha, garch_beta";
constexpr const char* kOptimizerKeys =
    "learning_rate, momentum_weight, samples, max_iterations, patience, "
    "smoothing_window, nu_update";
constexpr const char* kRateKeys =
    "family, problem, dimension, curvature, horizons, replications, zeta, "
    "noise_bound, epsilon_exponent";
constexpr const char* kOutputKeys = "directory, seed, timing";

void apply_key(ExperimentConfig& config, const std::string& path, int line,
               const std::string& section, const std::string& key,
               const std::string& value) {
  if (section == "model") {
    if (key == "kind") {
      config.model_kind = value;
    } else if (key == "prior_variance") {
      config.prior_variance = parse_double(path, line, key, value);
    } else if (key == "nu0") {
      config.nu0 = parse_double(path, line, key, value);
    } else if (key == "s0_scale") {
      config.s0_scale = parse_double(path, line, key, value);
    } else if (key == "sigma1_sq") {
      config.sigma1_sq = parse_double(path, line, key, value);
    } else {
      fail(path, line, "unknown key '" + key + "' in [model]; valid keys: " +
                           std::string(kModelKeys));
    }
  } else if (section == "data") {
    if (key == "path") {
      config.data_path = value;
    } else if (key == "synthetic") {
      config.synthetic_kind = value;
    } else if (key == "rows") {
      config.rows = static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "dimension") {
      config.dimension = static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "garch_w") {
      config.garch_w = parse_double(path, line, key, value);
    } else if (key == "garch_alpha") {
      config.garch_alpha = parse_double(path, line, key, value);
    } else if (key == "garch_beta") {
      config.garch_beta = parse_double(path, line, key, value);
    } else {
      fail(path, line, "unknown key '" + key + "' in [data]; valid keys: " +
                           std::string(kDataKeys));
    }
  } else if (section == "optimizer") {
    if (key == "learning_rate") {
      config.optimizer.learning_rate = parse_double(path, line, key, value);
    } else if (key == "momentum_weight") {
      config.optimizer.momentum_weight = parse_double(path, line, key, value);
    } else if (key == "samples") {
      config.optimizer.mc.sample_count =
          static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "max_iterations") {
      config.optimizer.max_iterations =
          static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "patience") {
      config.optimizer.patience =
          static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "smoothing_window") {
      config.optimizer.smoothing_window =
          static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "nu_update") {
      if (value == "natural") {
        config.optimizer.nu_update = NuUpdate::natural;
      } else if (value == "adam") {
        config.optimizer.nu_update = NuUpdate::adam;
      } else {
        fail(path, line,
             "nu_update must be 'natural' or 'adam', got '" + value + "'");
      }
    } else {
      fail(path, line, "unknown key '" + key +
                           "' in [optimizer]; valid keys: " +
                           std::string(kOptimizerKeys));
    }
  } else if (section == "rate") {
    if (key == "family") {
      config.rate_family = value;
    } else if (key == "problem") {
      config.rate_problem = value;
    } else if (key == "dimension") {
      config.rate_dimension =
          static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "curvature") {
      config.rate_curvature = parse_double(path, line, key, value);
    } else if (key == "horizons") {
      config.rate.horizons = parse_int_list(path, line, key, value);
    } else if (key == "replications") {
      config.rate.replications =
          static_cast<int>(parse_int(path, line, key, value));
    } else if (key == "zeta") {
      config.rate.zeta = parse_double(path, line, key, value);
    } else if (key == "noise_bound") {
      config.rate.noise_bound = parse_double(path, line, key, value);
    } else if (key == "epsilon_exponent") {
      config.rate.epsilon_exponent = parse_double(path, line, key, value);
    } else {
      fail(path, line, "unknown key '" + key + "' in [rate]; valid keys: " +
                           std::string(kRateKeys));
    }
  } else if (section == "output") {
    if (key == "directory") {
      config.output_dir = value;
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(
          parse_int(path, line, key, value));
    } else if (key == "timing") {
      config.timing = parse_bool(path, line, key, value);
    } else {
      fail(path, line, "unknown key '" + key + "' in [output]; valid keys: " +
                           std::string(kOutputKeys));
    }
  } else {
    fail(path, line, "unknown section [" + section +
                         "]; valid sections: model, data, optimizer, rate, "
                         "output");
  }
}

[[noreturn]] void range_error(const std::string& key,
                              const std::string& bound) {
  throw ConfigError("config: " + key + " must be " + bound);
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  ExperimentConfig config;
  config.rate.horizons = {100, 1000, 10000, 100000};
  config.rate.replications = 50;
  if (path.empty()) {
    return config;
  }

  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path + "' for reading");
  }
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(path, line_number, "unterminated section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      fail(path, line_number, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty()) fail(path, line_number, "empty key");
    if (section.empty()) {
      fail(path, line_number,
           "key '" + key + "' appears before any [section] header");
    }
    apply_key(config, path, line_number, section, key, value);
  }
  validate_config(config);
  return config;
}

void apply_overrides(ExperimentConfig& config, const FlagOverrides& flags) {
  if (flags.seed) config.seed = *flags.seed;
  if (flags.samples) config.optimizer.mc.sample_count = *flags.samples;
  if (flags.learning_rate) config.optimizer.learning_rate = *flags.learning_rate;
  if (flags.momentum) config.optimizer.momentum_weight = *flags.momentum;
  if (flags.max_iterations) config.optimizer.max_iterations = *flags.max_iterations;
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.timing) config.timing = true;
  validate_config(config);
}

void validate_config(const ExperimentConfig& config) {
  if (!config.command.empty() && config.command != "run-gvb" &&
      config.command != "run-wvb" && config.command != "rate-check" &&
      config.command != "generate-data") {
    throw ConfigError("config: unknown command '" + config.command +
                      "'; valid commands: run-gvb, run-wvb, rate-check, "
                      "generate-data");
  }
  if (config.model_kind != "logistic" && config.model_kind != "garch" &&
      config.model_kind != "gaussian_cov") {
    throw ConfigError("config: model kind must be one of logistic, garch, "
                      "gaussian_cov; got '" +
                      config.model_kind + "'");
  }
  if (!(config.prior_variance > 0.0)) range_error("prior_variance", "> 0");
  if (!(config.nu0 >= 0.0)) range_error("nu0", ">= 0 (0 selects the default)");
  if (!(config.s0_scale > 0.0)) range_error("s0_scale", "> 0");
  if (config.sigma1_sq && !(*config.sigma1_sq > 0.0)) {
    range_error("sigma1_sq", "> 0");
  }

  if (!config.data_path.empty() && !config.synthetic_kind.empty()) {
    throw ConfigError(
        "config: [data] path and synthetic are mutually exclusive");
  }
  if (!config.synthetic_kind.empty() &&
      config.synthetic_kind != "gaussian_cov" &&
      config.synthetic_kind != "garch" && config.synthetic_kind != "logistic") {
    throw ConfigError("config: synthetic must be one of gaussian_cov, garch, "
                      "logistic; got '" +
                      config.synthetic_kind + "'");
  }
  if (config.rows < 1) range_error("rows", ">= 1");
  if (config.dimension < 1) range_error("dimension", ">= 1");
  if (!(config.garch_w > 0.0)) range_error("garch_w", "> 0");
  if (!(config.garch_alpha >= 0.0)) range_error("garch_alpha", ">= 0");
  if (!(config.garch_beta >= 0.0)) range_error("garch_beta", ">= 0");
  if (!(config.garch_alpha + config.garch_beta < 1.0)) {
    throw ConfigError(
        "config: garch_alpha + garch_beta must be < 1 (stationarity)");
  }

  if (!(config.optimizer.learning_rate > 0.0)) {
    range_error("learning_rate", "> 0");
  }
  if (!(config.optimizer.momentum_weight >= 0.0 &&
        config.optimizer.momentum_weight < 1.0)) {
    range_error("momentum_weight", "in [0, 1)");
  }
  if (config.optimizer.mc.sample_count < 2) range_error("samples", ">= 2");
  if (config.optimizer.max_iterations < 1) {
    range_error("max_iterations", ">= 1");
  }
  if (config.optimizer.patience < 1) range_error("patience", ">= 1");
  if (config.optimizer.smoothing_window < 1) {
    range_error("smoothing_window", ">= 1");
  }

  if (config.rate_family != "nonconvex" &&
      config.rate_family != "strongly_convex") {
    throw ConfigError("config: rate family must be nonconvex or "
                      "strongly_convex; got '" +
                      config.rate_family + "'");
  }
  if (config.rate_problem != "spd" && config.rate_problem != "quadratic") {
    throw ConfigError("config: rate problem must be spd or quadratic; got '" +
                      config.rate_problem + "'");
  }
  if (config.rate_dimension < 1) range_error("rate dimension", ">= 1");
  if (!(config.rate_curvature > 0.0)) range_error("curvature", "> 0");
  if (config.rate.horizons.empty()) range_error("horizons", "non-empty");
  int prev = 0;
  for (int t : config.rate.horizons) {
    if (t < 1 || t <= prev) {
      throw ConfigError(
          "config: horizons must be strictly increasing integers >= 1");
    }
    prev = t;
  }
  if (config.rate.replications < 1) range_error("replications", ">= 1");
  if (!(config.rate.zeta >= 0.0 && config.rate.zeta < 1.0)) {
    range_error("zeta", "in [0, 1)");
  }
  if (!(config.rate.noise_bound >= 0.0)) range_error("noise_bound", ">= 0");
  if (!(config.rate.epsilon_exponent > 0.0 &&
        config.rate.epsilon_exponent < 1.0)) {
    range_error("epsilon_exponent", "in (0, 1)");
  }
}

}  // namespace mvb
