#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>

#include "mvb/rng.hpp"
#include "mvb/variational_params.hpp"

namespace mvb {

/// Monte Carlo estimate of a Fisher information matrix: the covariance of
/// the score over draws from the family.
struct FisherEstimate {
  Eigen::MatrixXd matrix;
  int sample_count = 0;
};

/// Natural gradient for the Gaussian family under the block Fisher metric
/// diag(Sigma^{-1}, Sigma^{-1} (x) Sigma^{-1}):
///   (Sigma * grad_mu, Sigma * grad_sigma * Sigma).
/// The Kronecker form drops the factor 1/2 of the exact vec(Sigma) Fisher
/// block (exact 1-D value 1/(2 sigma^4) vs 1/sigma^4 here); everything
/// downstream uses this operational metric, and the natural gradients are
/// formed by direct O(d^3) products, never via the d^2 x d^2 Kronecker
/// matrix.  Result is the Riemannian gradient used by the SPD optimizer.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_natural_gradient(
    const GaussianVariationalParams& params, const Eigen::VectorXd& grad_mu,
    const Eigen::MatrixXd& grad_sigma);

/// Natural gradient of the inverse-Wishart scale block:
///   Sigma_q * grad_sigma * Sigma_q, symmetrized.
Eigen::MatrixXd wishart_natural_gradient_sigma(
    const WishartVariationalParams& params, const Eigen::MatrixXd& grad_sigma);

/// Natural gradient of the degrees-of-freedom coordinate: the score variance
/// of nu under the zero-correlation approximation is (1/4) psi'_d(nu/2), so
/// the natural step scales grad_nu by its inverse.
double wishart_natural_gradient_nu(const WishartVariationalParams& params,
                                   double grad_nu);

struct MultivariateSpecial {
  double log_gamma;
  double digamma;
  double trigamma;
};

/// Bundled multivariate gamma values (log Gamma_d, psi_d, psi'_d) at nu.
MultivariateSpecial multivariate_special(int d, double nu);

/// Monte Carlo covariance of the score: draws S scores through score_sampler
/// (which receives a per-sample Rng) and returns their sample covariance
/// (1/(S-1) normalization).  Per-sample substreams are derived from
/// (seed, 0, sample index) and the reductions use a fixed pairwise tree, so
/// the estimate is bit-identical for any thread count.
FisherEstimate empirical_fisher(
    const std::function<Eigen::VectorXd(Rng&)>& score_sampler, int sample_count,
    std::uint64_t seed);

}  // namespace mvb
