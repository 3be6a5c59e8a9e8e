#include "mvb/variational_params.hpp"

#include <string>

#include "mvb/errors.hpp"

namespace mvb {

Eigen::VectorXd flatten_upper_triangle(const Eigen::MatrixXd& sym) {
  const int d = static_cast<int>(sym.rows());
  if (sym.cols() != d) {
    throw PreconditionError("flatten_upper_triangle: matrix must be square");
  }
  Eigen::VectorXd v(symmetric_free_count(d));
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      v(k++) = sym(i, j);
    }
  }
  return v;
}

Eigen::MatrixXd unflatten_upper_triangle(const Eigen::VectorXd& v, int d) {
  if (v.size() != symmetric_free_count(d)) {
    throw PreconditionError("unflatten_upper_triangle: length mismatch");
  }
  Eigen::MatrixXd m(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      m(i, j) = v(k);
      m(j, i) = v(k);
      ++k;
    }
  }
  return m;
}

Eigen::MatrixXd symmetric_gradient_from_free(const Eigen::VectorXd& v, int d) {
  const Eigen::MatrixXd doubled = unflatten_upper_triangle(v, d);
  Eigen::MatrixXd g = 0.5 * doubled;
  g.diagonal() = doubled.diagonal();
  return g;
}

GaussianVariationalParams::GaussianVariationalParams(Eigen::VectorXd mu_in,
                                                     SpdPoint sigma_in)
    : mu(std::move(mu_in)), sigma(std::move(sigma_in)) {
  if (mu.size() != sigma.dim()) {
    throw PreconditionError(
        "GaussianVariationalParams: mu and sigma dimensions disagree");
  }
}

Eigen::VectorXd GaussianVariationalParams::flatten() const {
  Eigen::VectorXd out(lambda_dim());
  out.head(dim()) = mu;
  out.tail(symmetric_free_count(dim())) =
      flatten_upper_triangle(sigma.matrix());
  return out;
}

WishartVariationalParams::WishartVariationalParams(double nu_in,
                                                   SpdPoint sigma_q_in)
    : nu(nu_in), sigma_q(std::move(sigma_q_in)) {
  const int d = dim();
  if (!(nu > d - 1)) {
    throw PreconditionError("WishartVariationalParams: need nu > d - 1, got " +
                            std::to_string(nu) + " with d=" +
                            std::to_string(d));
  }
}

Eigen::VectorXd WishartVariationalParams::flatten() const {
  Eigen::VectorXd out(lambda_dim());
  out(0) = nu;
  out.tail(symmetric_free_count(dim())) =
      flatten_upper_triangle(sigma_q.matrix());
  return out;
}

Eigen::MatrixXd inverse_wishart_mean(const WishartVariationalParams& p) {
  const int d = p.dim();
  if (!(p.nu > d + 1)) {
    throw PreconditionError("inverse_wishart_mean: need nu > d + 1");
  }
  return p.sigma_q.matrix() / (p.nu - d - 1);
}

double inverse_wishart_element_variance(const WishartVariationalParams& p,
                                        int i, int j) {
  const int d = p.dim();
  if (i < 0 || j < 0 || i >= d || j >= d) {
    throw PreconditionError("inverse_wishart_element_variance: index range");
  }
  if (!(p.nu > d + 3)) {
    throw PreconditionError("inverse_wishart_element_variance: need nu > d + 3");
  }
  const double a = p.nu - d;
  const Eigen::MatrixXd& s = p.sigma_q.matrix();
  const double num =
      (a + 1.0) * s(i, j) * s(i, j) + (a - 1.0) * s(i, i) * s(j, j);
  const double den = a * (a - 1.0) * (a - 1.0) * (a - 3.0);
  return num / den;
}

}  // namespace mvb
