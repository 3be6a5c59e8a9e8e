#include "mvb/experiment.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "mvb/csv.hpp"
#include "mvb/errors.hpp"
#include "mvb/models.hpp"
#include "mvb/optimizer.hpp"
#include "mvb/sgd_harness.hpp"
#include "mvb/variational_params.hpp"

namespace mvb {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string join(const ExperimentConfig& config, const char* file) {
  return (fs::path(config.output_dir) / file).string();
}

void ensure_output_dir(const ExperimentConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw ConfigError("output: cannot create directory '" + config.output_dir +
                      "': " + ec.message());
  }
}

Dataset resolve_dataset(const ExperimentConfig& config) {
  if (!config.data_path.empty()) {
    return load_csv(config.data_path);
  }
  if (!config.synthetic_kind.empty()) {
    SyntheticSpec spec;
    spec.kind = config.synthetic_kind;
    spec.dimension = config.dimension;
    spec.garch_w = config.garch_w;
    spec.garch_alpha = config.garch_alpha;
    spec.garch_beta = config.garch_beta;
    return generate_synthetic(spec, config.rows, config.seed);
  }
  throw ConfigError(
      "config: [data] needs either path (a CSV file) or synthetic (a "
      "generator kind)");
}

/// Splits a table into the response column named "y" and the remaining
/// columns as predictors, preserving their file order.
void split_response(const Dataset& data, Eigen::MatrixXd& x,
                    Eigen::VectorXd& y) {
  const Eigen::Index y_col = column_index(data, "y");
  const Eigen::Index n = data.observations.rows();
  const Eigen::Index p = data.observations.cols() - 1;
  if (p < 1) {
    throw ConfigError("data: logistic regression needs at least one "
                      "predictor column besides 'y'");
  }
  y = data.observations.col(y_col);
  x.resize(n, p);
  Eigen::Index out = 0;
  for (Eigen::Index c = 0; c < data.observations.cols(); ++c) {
    if (c == y_col) continue;
    x.col(out++) = data.observations.col(c);
  }
}

Eigen::VectorXd series_column(const Dataset& data) {
  if (data.observations.cols() == 1) return data.observations.col(0);
  return data.observations.col(column_index(data, "y"));
}

ModelSpec build_gvb_model(const ExperimentConfig& config,
                          const Dataset& data) {
  if (config.model_kind == "logistic") {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    split_response(data, x, y);
    return make_logistic_model(x, y, config.prior_variance);
  }
  if (config.model_kind == "garch") {
    return make_garch_model(series_column(data), config.sigma1_sq);
  }
  throw ConfigError(
      "config: run-gvb supports model kinds logistic and garch (use run-wvb "
      "for gaussian_cov)");
}

std::vector<std::string> gvb_parameter_names(int d) {
  std::vector<std::string> names;
  for (int i = 1; i <= d; ++i) names.push_back("mu_" + std::to_string(i));
  for (int i = 1; i <= d; ++i) {
    for (int j = i; j <= d; ++j) {
      names.push_back("sigma_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  return names;
}

std::vector<std::string> wvb_parameter_names(int d) {
  std::vector<std::string> names{"nu"};
  for (int i = 1; i <= d; ++i) {
    for (int j = i; j <= d; ++j) {
      names.push_back("sigma_q_" + std::to_string(i) + "_" +
                      std::to_string(j));
    }
  }
  return names;
}

void write_trace(const std::string& path,
                 const std::vector<TraceRecord>& trace,
                 const std::vector<std::string>& parameter_names) {
  std::vector<std::string> header{"iteration", "lower_bound",
                                  "smoothed_lower_bound", "gradient_norm"};
  header.insert(header.end(), parameter_names.begin(), parameter_names.end());
  std::vector<std::vector<std::string>> rows;
  rows.reserve(trace.size());
  for (const TraceRecord& rec : trace) {
    std::vector<std::string> row;
    row.reserve(header.size());
    row.push_back(std::to_string(rec.iteration));
    row.push_back(format_double(rec.lower_bound));
    row.push_back(format_double(rec.smoothed_lower_bound));
    row.push_back(format_double(rec.gradient_norm));
    for (Eigen::Index k = 0; k < rec.parameters.size(); ++k) {
      row.push_back(format_double(rec.parameters(k)));
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_summary(const ExperimentConfig& config,
                   const std::vector<TraceRecord>& trace,
                   const std::vector<std::string>& parameter_names,
                   double wall_seconds) {
  if (trace.empty()) {
    throw NumericalError("summary: the optimizer produced an empty trace");
  }
  const TraceRecord& last = trace.back();
  ordered_json summary;
  summary["command"] = config.command;
  summary["model"] = config.model_kind;
  summary["seed"] = config.seed;
  summary["iterations"] = last.iteration;
  summary["final_lower_bound"] = last.lower_bound;
  summary["final_smoothed_lower_bound"] = last.smoothed_lower_bound;
  summary["final_gradient_norm"] = last.gradient_norm;
  ordered_json params = ordered_json::object();
  for (Eigen::Index k = 0; k < last.parameters.size(); ++k) {
    params[parameter_names[static_cast<std::size_t>(k)]] = last.parameters(k);
  }
  summary["final_parameters"] = params;
  if (config.timing) summary["wall_time_seconds"] = wall_seconds;
  write_file_atomic(join(config, "summary.json"), summary.dump(2) + "\n");
}

void run_gvb(const ExperimentConfig& config) {
  const Dataset data = resolve_dataset(config);
  const ModelSpec model = build_gvb_model(config, data);
  const int d = model.parameter_dimension;
  // Neutral start: centered mean, mildly contracted covariance.  A scale
  // well below 1 keeps early natural-gradient steps inside the retraction's
  // stability region even when the target is far away.
  const GaussianVariationalParams init(
      Eigen::VectorXd::Zero(d),
      SpdPoint(0.1 * Eigen::MatrixXd::Identity(d, d)));

  const auto started = std::chrono::steady_clock::now();
  OptimizerConfig opt = config.optimizer;
  opt.mc.seed = config.seed;
  const GvbResult result = run_manifold_gvb(model, init, opt);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  const std::vector<std::string> names = gvb_parameter_names(d);
  write_trace(join(config, "trace.csv"), result.trace, names);
  write_summary(config, result.trace, names, wall);
}

void run_wvb(const ExperimentConfig& config) {
  if (config.model_kind != "gaussian_cov") {
    throw ConfigError(
        "config: run-wvb requires model kind gaussian_cov (the "
        "inverse-Wishart family models a covariance matrix)");
  }
  const Dataset data = resolve_dataset(config);
  const Eigen::MatrixXd& y = data.observations;
  const int d = static_cast<int>(y.cols());
  const int n = static_cast<int>(y.rows());
  const double nu0 = config.nu0 == 0.0 ? static_cast<double>(d) : config.nu0;
  if (!(nu0 > d - 1)) {
    throw ConfigError("config: nu0 must exceed dimension - 1 = " +
                      std::to_string(d - 1) +
                      " for the prior to be a proper distribution");
  }
  const SpdPoint s0(config.s0_scale * Eigen::MatrixXd::Identity(d, d));
  const ModelSpec model = make_gaussian_cov_model(y, nu0, s0);

  // Warm start at the data scale: degrees of freedom near the sample count
  // (kept high enough for the family's first two moments to exist) and the
  // scatter matrix, ridged so it is positive definite even when n < d.
  const double nu_init = std::max<double>(n, d + 4);
  const SpdPoint sigma_q_init(
      (y.transpose() * y +
       config.s0_scale * Eigen::MatrixXd::Identity(d, d))
          .eval());
  const WishartVariationalParams init(nu_init, sigma_q_init);

  const auto started = std::chrono::steady_clock::now();
  OptimizerConfig opt = config.optimizer;
  opt.mc.seed = config.seed;
  const WvbResult result = run_manifold_wvb(model, init, opt);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  const std::vector<std::string> names = wvb_parameter_names(d);
  write_trace(join(config, "trace.csv"), result.trace, names);
  write_summary(config, result.trace, names, wall);

  // Element-wise comparison with the conjugate posterior, one row per free
  // coordinate of the covariance.
  const WishartVariationalParams exact = exact_iw_posterior(nu0, s0, y);
  const Eigen::MatrixXd vb_mean = inverse_wishart_mean(result.params);
  const Eigen::MatrixXd exact_mean = inverse_wishart_mean(exact);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      rows.push_back(
          {std::to_string(i + 1), std::to_string(j + 1),
           format_double(vb_mean(i, j)), format_double(exact_mean(i, j)),
           format_double(
               inverse_wishart_element_variance(result.params, i, j)),
           format_double(inverse_wishart_element_variance(exact, i, j))});
    }
  }
  write_csv(join(config, "comparison.csv"),
            {"row", "col", "vb_mean", "exact_mean", "vb_variance",
             "exact_variance"},
            rows);
}

void write_rate_outputs(const ExperimentConfig& config,
                        const RateEstimate& estimate,
                        const RateSamples& samples) {
  std::vector<std::vector<std::string>> rows;
  for (Eigen::Index h = 0; h < samples.by_replication.rows(); ++h) {
    for (Eigen::Index r = 0; r < samples.by_replication.cols(); ++r) {
      rows.push_back({std::to_string(samples.horizons[static_cast<std::size_t>(h)]),
                      std::to_string(r + 1),
                      format_double(samples.by_replication(h, r))});
    }
  }
  write_csv(join(config, "rate.csv"), {"T", "replication", "statistic"}, rows);

  ordered_json summary;
  summary["slope"] = estimate.fitted_slope;
  summary["stderr"] = estimate.slope_stderr;
  summary["horizons"] = estimate.horizons;
  summary["statistics"] = estimate.statistics;
  summary["family"] = config.rate_family;
  summary["problem"] = config.rate_problem;
  summary["seed"] = config.seed;
  write_file_atomic(join(config, "rate_summary.json"), summary.dump(2) + "\n");
}

void run_rate_check(const ExperimentConfig& config) {
  RateCheckConfig rate = config.rate;
  rate.seed = config.seed;
  const RateFamily family = config.rate_family == "nonconvex"
                                ? RateFamily::nonconvex
                                : RateFamily::strongly_convex;
  RateSamples samples;
  RateEstimate estimate;
  const int d = config.rate_dimension;
  if (config.rate_problem == "spd") {
    Eigen::MatrixXd target(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        target(i, j) = std::pow(-0.5, std::abs(i - j));
      }
    }
    const SpdLogDistanceProblem problem{
        SpdPoint(target), SpdPoint(3.0 * Eigen::MatrixXd::Identity(d, d))};
    estimate = estimate_rate(problem, family, rate, &samples);
  } else {
    Eigen::VectorXd target(d);
    for (int i = 0; i < d; ++i) target(i) = (i % 2 == 0) ? 1.2 : -0.7;
    const QuadraticCostProblem problem(target, Eigen::VectorXd::Zero(d),
                                       config.rate_curvature);
    estimate = estimate_rate(problem, family, rate, &samples);
  }
  write_rate_outputs(config, estimate, samples);
}

void run_generate_data(const ExperimentConfig& config) {
  if (config.synthetic_kind.empty()) {
    throw ConfigError(
        "config: generate-data needs [data] synthetic = gaussian_cov | garch "
        "| logistic");
  }
  const Dataset data = resolve_dataset(config);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(data.observations.rows()));
  for (Eigen::Index r = 0; r < data.observations.rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(data.observations.cols()));
    for (Eigen::Index c = 0; c < data.observations.cols(); ++c) {
      row.push_back(format_double(data.observations(r, c)));
    }
    rows.push_back(std::move(row));
  }
  write_csv(join(config, "data.csv"), data.column_names, rows);
}

}  // namespace

void run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  if (config.command.empty()) {
    throw ConfigError("config: no command selected");
  }
  ensure_output_dir(config);
  if (config.command == "run-gvb") {
    run_gvb(config);
  } else if (config.command == "run-wvb") {
    run_wvb(config);
  } else if (config.command == "rate-check") {
    run_rate_check(config);
  } else {
    run_generate_data(config);
  }
}

}  // namespace mvb
