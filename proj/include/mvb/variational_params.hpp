#pragma once

#include <Eigen/Dense>

#include "mvb/manifold.hpp"

namespace mvb {

/// Number of free coordinates of a symmetric d x d matrix.
inline int symmetric_free_count(int d) { return d * (d + 1) / 2; }

/// Flattens a symmetric matrix to its upper triangle (including the
/// diagonal) in row-major order: (0,0), (0,1), ..., (0,d-1), (1,1), ...
/// This is the coordinate order used everywhere a covariance-like block
/// appears inside a flat parameter or score vector.
Eigen::VectorXd flatten_upper_triangle(const Eigen::MatrixXd& sym);

/// Inverse of flatten_upper_triangle.
Eigen::MatrixXd unflatten_upper_triangle(const Eigen::VectorXd& v, int d);

/// Interprets v as derivatives with respect to the free coordinates of a
/// symmetric matrix (upper-triangle order, each off-diagonal entry carrying
/// both symmetric positions) and returns the equivalent symmetric
/// matrix-form derivative: off-diagonals halved, diagonal kept.
Eigen::MatrixXd symmetric_gradient_from_free(const Eigen::VectorXd& v, int d);

/// Parameters of a Gaussian variational family N(mu, Sigma).
struct GaussianVariationalParams {
  Eigen::VectorXd mu;
  SpdPoint sigma;

  GaussianVariationalParams(Eigen::VectorXd mu_in, SpdPoint sigma_in);

  int dim() const { return static_cast<int>(mu.size()); }
  /// Free-coordinate count: d for mu plus d(d+1)/2 for Sigma.
  int lambda_dim() const { return dim() + symmetric_free_count(dim()); }
  /// [mu, upper triangle of Sigma].
  Eigen::VectorXd flatten() const;
};

/// Parameters of an inverse-Wishart variational family IW(nu, Sigma_q);
/// requires nu > d - 1 for the density to exist.
struct WishartVariationalParams {
  double nu;
  SpdPoint sigma_q;

  WishartVariationalParams(double nu_in, SpdPoint sigma_q_in);

  int dim() const { return static_cast<int>(sigma_q.dim()); }
  /// Free-coordinate count: 1 for nu plus d(d+1)/2 for Sigma_q.
  int lambda_dim() const { return 1 + symmetric_free_count(dim()); }
  /// [nu, upper triangle of Sigma_q].
  Eigen::VectorXd flatten() const;
};

/// E[V] = Sigma_q / (nu - d - 1); requires nu > d + 1.
Eigen::MatrixXd inverse_wishart_mean(const WishartVariationalParams& p);

/// Var(V_ij) of the inverse-Wishart, requires nu > d + 3:
///   [(nu-d+1) S_ij^2 + (nu-d-1) S_ii S_jj]
///   / [(nu-d)(nu-d-1)^2(nu-d-3)].
double inverse_wishart_element_variance(const WishartVariationalParams& p,
                                        int i, int j);

}  // namespace mvb
