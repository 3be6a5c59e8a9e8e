#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mvb/manifold.hpp"
#include "mvb/variational_params.hpp"

namespace mvb {

/// A pluggable target: the log of the joint density p(theta) p(y | theta)
/// as a pure function of the flattened parameter vector.  When a model works
/// in a transformed (unconstrained) parameterization, the transform's
/// log-Jacobian is part of log_joint, so variational families always live on
/// the unconstrained space.
struct ModelSpec {
  int parameter_dimension = 0;
  std::function<double(const Eigen::VectorXd&)> log_joint;
  std::string description;
};

/// A parsed data table: one observation per row.
struct Dataset {
  Eigen::MatrixXd observations;
  std::vector<std::string> column_names;
};

/// Log joint of Bayesian logistic regression:
///   sum_i [ y_i x_i'beta - log(1 + exp(x_i'beta)) ] + log N(beta; 0, v I),
/// with the log(1+exp) evaluated stably for large |x_i'beta|.
double logistic_log_joint(const Eigen::VectorXd& beta,
                          const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double prior_variance = 10.0);

/// Log joint of a GARCH(1,1) model in unconstrained coordinates
/// theta = (theta_w, theta_psi1, theta_psi2):
///   w = exp(theta_w), psi_k = logistic(theta_psik),
///   alpha = psi1 (1 - psi2), beta = psi1 psi2   (so alpha + beta = psi1 < 1),
///   sigma_t^2 = w + alpha sigma_{t-1}^2 + beta y_{t-1}^2.
/// Returns Gaussian log-likelihood + log IG(1,1) prior on w + uniform priors
/// on psi + the transform log-Jacobian log w + log psi1(1-psi1)
/// + log psi2(1-psi2).  sigma_1^2 defaults to the sample variance of y.
double garch_log_joint(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                       std::optional<double> sigma1_sq = std::nullopt);

/// Log joint of the zero-mean Gaussian model with covariance V and
/// inverse-Wishart(nu0, S0) prior: sum_i log N(y_i; 0, V) + log IW(V).
double gaussian_cov_log_joint(const SpdPoint& v, const Eigen::MatrixXd& data,
                              double nu0, const SpdPoint& s0);

/// Conjugate update for the model above: the posterior of V is
/// inverse-Wishart(nu0 + n, S0 + sum_i y_i y_i').
WishartVariationalParams exact_iw_posterior(double nu0, const SpdPoint& s0,
                                            const Eigen::MatrixXd& data);

/// Closed-form log marginal likelihood (evidence) of the same conjugate
/// model:
///   -(nd/2) log pi + (nu0/2) log|S0| - (nu_n/2) log|S_n|
///   + log Gamma_d(nu_n/2) - log Gamma_d(nu0/2),  nu_n = nu0 + n.
double gaussian_cov_log_marginal(double nu0, const SpdPoint& s0,
                                 const Eigen::MatrixXd& data);

/// Model factories binding data into ModelSpec closures.
/// theta layout: beta itself (logistic), (theta_w, theta_psi1, theta_psi2)
/// (garch), flattened d x d matrix V in column order (gaussian_cov).
ModelSpec make_logistic_model(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y,
                              double prior_variance = 10.0);
ModelSpec make_garch_model(const Eigen::VectorXd& y,
                           std::optional<double> sigma1_sq = std::nullopt);
ModelSpec make_gaussian_cov_model(const Eigen::MatrixXd& data, double nu0,
                                  const SpdPoint& s0);

/// Recipe for synthetic data generation.
struct SyntheticSpec {
  std::string kind;  // "gaussian_cov" | "garch" | "logistic"
  int dimension = 5;  // gaussian_cov matrix size / logistic predictor count
  double garch_w = 0.05;
  double garch_alpha = 0.85;
  double garch_beta = 0.1;
  /// Logistic true coefficients; empty -> drawn N(0, 0.5^2) from the seed.
  Eigen::VectorXd logistic_beta;
};

/// Deterministic synthetic data:
///  - gaussian_cov: n draws from N_d(0, V) with v_ij = (-0.5)^|i-j|,
///    columns y1..yd;
///  - garch: one column y, variance recursion started at the stationary
///    variance w / (1 - alpha - beta);
///  - logistic: standard-normal predictors x1..xd plus binary response y.
Dataset generate_synthetic(const SyntheticSpec& spec, int n,
                           std::uint64_t seed);

}  // namespace mvb
