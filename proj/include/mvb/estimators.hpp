#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "mvb/manifold.hpp"
#include "mvb/models.hpp"
#include "mvb/variational_params.hpp"

namespace mvb {

/// Sampling budget and seed for one Monte Carlo batch.  The same (seed,
/// iteration, sample index) triple always maps to the same RNG substream, so
/// every estimate below is reproducible bit for bit, with any thread count.
struct MonteCarloConfig {
  int sample_count = 100;
  std::uint64_t seed = 0;
};

/// Score-function gradient estimate over the flat variational coordinates,
/// together with freshly fitted control-variate coefficients.  The
/// coefficients are estimated from this batch's samples but are meant to be
/// applied to the NEXT batch: using them on the samples they were fitted to
/// would bias the estimator.
struct GradientEstimate {
  Eigen::VectorXd value;
  Eigen::VectorXd control_coefficients;
};

/// Gradient estimate plus the lower-bound estimate from the same samples.
struct BatchStats {
  GradientEstimate gradient;
  double lower_bound = 0.0;
};

/// S draws from N(mu, Sigma), one per row.  Draw s uses the substream
/// (config.seed, 0, s), matching iteration 0 of the iterated estimators.
Eigen::MatrixXd sample_gaussian(const GaussianVariationalParams& params,
                                const MonteCarloConfig& config);

/// log N(theta; mu, Sigma).
double gaussian_log_density(const GaussianVariationalParams& params,
                            const Eigen::VectorXd& theta);

/// Score of the Gaussian log-density with respect to the flat coordinates
/// (mu, then row-major upper triangle of Sigma).  Off-diagonal entries are
/// free-coordinate derivatives: they carry both symmetric positions.
Eigen::VectorXd gaussian_score(const GaussianVariationalParams& params,
                               const Eigen::VectorXd& theta);

/// S draws from the inverse-Wishart(nu_q, Sigma_q) distribution via the
/// Bartlett decomposition.  Substream convention matches sample_gaussian.
std::vector<SpdPoint> sample_inverse_wishart(
    const WishartVariationalParams& params, const MonteCarloConfig& config);

/// log IW(V; nu_q, Sigma_q).
double inverse_wishart_log_density(const WishartVariationalParams& params,
                                   const SpdPoint& v);

/// Score of the inverse-Wishart log-density: the scalar nu_q derivative and
/// the d x d Sigma_q derivative (symmetric matrix form, not doubled).
std::pair<double, Eigen::MatrixXd> inverse_wishart_score(
    const WishartVariationalParams& params, const SpdPoint& v);

/// Monte Carlo estimate of the evidence lower bound
///   (1/S) sum_s [log p(y, theta_s) - log q_lambda(theta_s)],  theta_s ~ q.
double estimate_lower_bound(const ModelSpec& model,
                            const GaussianVariationalParams& params,
                            const MonteCarloConfig& config);
double estimate_lower_bound(const ModelSpec& model,
                            const WishartVariationalParams& params,
                            const MonteCarloConfig& config);

/// Score-function (black-box) gradient of the lower bound with lagged control
/// variates:
///   value_i = (1/S) sum_s score_i(theta_s) (h(theta_s) - c_prev_i),
/// h = log p(y, theta) - log q_lambda(theta).  Also fits fresh coefficients
///   c_i = cov(score_i, score_i h) / var(score_i)
/// from the same batch for use at the next iteration; a coordinate with zero
/// score variance gets c_i = 0.  `iteration` selects the RNG substream so
/// consecutive optimizer steps see independent samples from one seed.
GradientEstimate score_function_gradient(const ModelSpec& model,
                                         const GaussianVariationalParams& params,
                                         const MonteCarloConfig& config,
                                         const Eigen::VectorXd& c_prev,
                                         std::uint64_t iteration = 0);
GradientEstimate score_function_gradient(const ModelSpec& model,
                                         const WishartVariationalParams& params,
                                         const MonteCarloConfig& config,
                                         const Eigen::VectorXd& c_prev,
                                         std::uint64_t iteration = 0);

/// As score_function_gradient, but also returns the lower-bound estimate
/// computed from the same samples (one shared batch per optimizer step).
/// estimate_gradient(...).lower_bound at iteration 0 is bit-identical to
/// estimate_lower_bound with the same configuration.
BatchStats estimate_gradient(const ModelSpec& model,
                             const GaussianVariationalParams& params,
                             const MonteCarloConfig& config,
                             const Eigen::VectorXd& c_prev,
                             std::uint64_t iteration = 0);
BatchStats estimate_gradient(const ModelSpec& model,
                             const WishartVariationalParams& params,
                             const MonteCarloConfig& config,
                             const Eigen::VectorXd& c_prev,
                             std::uint64_t iteration = 0);

}  // namespace mvb
