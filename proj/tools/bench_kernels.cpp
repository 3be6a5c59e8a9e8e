// Benchmark comparing the OpenMP kernels against the serial reference path.
// Both paths share per-element bodies and fixed-shape reductions, so their
// outputs must agree bit for bit; this binary verifies that on realistic
// workloads and reports wall times and speedup.

#include <chrono>
#include <cstdio>
#include <utility>

#include <Eigen/Dense>

#include "mvb/estimators.hpp"
#include "mvb/models.hpp"
#include "mvb/parallel.hpp"
#include "mvb/sgd_harness.hpp"
#include "mvb/variational_params.hpp"

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

/// Runs fn() once serial and once parallel, returning (serial, parallel)
/// wall seconds for the fastest of `repeats` attempts each.
template <typename Fn>
std::pair<double, double> time_both(Fn fn, int repeats) {
  double serial = 1e300, parallel = 1e300;
  for (int r = 0; r < repeats; ++r) {
    mvb::parallel::set_enabled(false);
    double t0 = now_seconds();
    fn();
    serial = std::min(serial, now_seconds() - t0);

    mvb::parallel::set_enabled(true);
    t0 = now_seconds();
    fn();
    parallel = std::min(parallel, now_seconds() - t0);
  }
  return {serial, parallel};
}

void print_row(const char* name, double serial, double parallel,
               bool identical) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name, serial, parallel,
              serial / parallel, identical ? "bitwise equal" : "MISMATCH");
}

bool bench_gradient_kernel() {
  mvb::SyntheticSpec spec;
  spec.kind = "logistic";
  spec.dimension = 25;
  const mvb::Dataset data = mvb::generate_synthetic(spec, 2000, 31);
  const Eigen::MatrixXd x = data.observations.leftCols(25);
  const Eigen::VectorXd y = data.observations.col(25);
  const mvb::ModelSpec model = mvb::make_logistic_model(x, y);

  const mvb::GaussianVariationalParams params(
      Eigen::VectorXd::Zero(25),
      mvb::SpdPoint(0.1 * Eigen::MatrixXd::Identity(25, 25)));
  mvb::MonteCarloConfig mc;
  mc.sample_count = 4000;
  mc.seed = 7;
  const Eigen::VectorXd controls = Eigen::VectorXd::Zero(params.lambda_dim());

  mvb::BatchStats result{};
  auto run = [&] { result = mvb::estimate_gradient(model, params, mc, controls, 3); };

  mvb::parallel::set_enabled(false);
  run();
  const mvb::BatchStats serial_result = result;
  mvb::parallel::set_enabled(true);
  run();
  const bool identical =
      serial_result.lower_bound == result.lower_bound &&
      serial_result.gradient.value == result.gradient.value &&
      serial_result.gradient.control_coefficients ==
          result.gradient.control_coefficients;

  const auto [serial, parallel] = time_both(run, 3);
  print_row("score-function gradient", serial, parallel, identical);
  return identical;
}

bool bench_rate_replications() {
  Eigen::MatrixXd target(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      target(i, j) = std::pow(-0.5, std::abs(i - j));
    }
  }
  const mvb::SpdLogDistanceProblem problem{
      mvb::SpdPoint(target),
      mvb::SpdPoint(3.0 * Eigen::MatrixXd::Identity(3, 3))};
  mvb::RateCheckConfig config;
  config.horizons = {300, 1000, 3000};
  config.replications = 24;
  config.seed = 11;

  mvb::RateEstimate estimate;
  auto run = [&] {
    estimate =
        mvb::estimate_rate(problem, mvb::RateFamily::nonconvex, config);
  };

  mvb::parallel::set_enabled(false);
  run();
  const mvb::RateEstimate serial_estimate = estimate;
  mvb::parallel::set_enabled(true);
  run();
  bool identical = serial_estimate.fitted_slope == estimate.fitted_slope &&
                   serial_estimate.slope_stderr == estimate.slope_stderr;
  for (std::size_t h = 0; h < estimate.statistics.size(); ++h) {
    identical =
        identical && serial_estimate.statistics[h] == estimate.statistics[h];
  }

  const auto [serial, parallel] = time_both(run, 3);
  print_row("momentum SGD replications", serial, parallel, identical);
  return identical;
}

}  // namespace

int main() {
  std::printf("threads available to the parallel path: %d\n\n",
              mvb::parallel::worker_count());
  std::printf("%-28s %11s %11s %9s   %s\n", "kernel", "serial", "parallel",
              "speedup", "consistency");

  bool ok = bench_gradient_kernel();
  ok = bench_rate_replications() && ok;

  if (!ok) {
    std::printf("\nserial and parallel paths disagree\n");
    return 1;
  }
  return 0;
}
