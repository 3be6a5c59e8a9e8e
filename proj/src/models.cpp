#include "mvb/models.hpp"

#include <cmath>

#include "mvb/errors.hpp"
#include "mvb/rng.hpp"
#include "mvb/special_functions.hpp"

namespace mvb {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// log(1 + exp(z)) without overflow: for z > 0 use z + log1p(exp(-z)).
inline double log1p_exp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

inline double logistic_fn(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double sample_variance(const Eigen::VectorXd& y) {
  const double n = static_cast<double>(y.size());
  const double mean = y.sum() / n;
  return (y.array() - mean).square().sum() / (n - 1.0);
}

// log |V| and tr(V^{-1} A) through one factorization; throws on non-SPD V.
struct SpdSolve {
  double log_det;
  Eigen::LLT<Eigen::MatrixXd> llt;

  explicit SpdSolve(const Eigen::MatrixXd& v) : llt(v) {
    if (llt.info() != Eigen::Success) {
      throw NumericalError("matrix is not positive definite");
    }
    log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  double trace_inverse_product(const Eigen::MatrixXd& a) const {
    return llt.solve(a).trace();
  }
};

}  // namespace

double logistic_log_joint(const Eigen::VectorXd& beta,
                          const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          double prior_variance) {
  const Eigen::Index n = x.rows();
  if (beta.size() != x.cols() || y.size() != n) {
    throw PreconditionError("logistic_log_joint: dimension mismatch");
  }
  if (!(prior_variance > 0.0)) {
    throw PreconditionError("logistic_log_joint: prior variance must be > 0");
  }
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    ll += y(i) * eta(i) - log1p_exp(eta(i));
  }
  const double d = static_cast<double>(beta.size());
  const double log_prior = -0.5 * d * (kLog2Pi + std::log(prior_variance)) -
                           0.5 * beta.squaredNorm() / prior_variance;
  return ll + log_prior;
}

double garch_log_joint(const Eigen::VectorXd& theta, const Eigen::VectorXd& y,
                       std::optional<double> sigma1_sq) {
  if (theta.size() != 3) {
    throw PreconditionError("garch_log_joint: theta must have 3 entries");
  }
  const Eigen::Index n = y.size();
  if (n < 2) {
    throw PreconditionError("garch_log_joint: need at least 2 observations");
  }
  if (!theta.allFinite()) {
    throw NumericalError("garch_log_joint: non-finite parameters");
  }
  const double w = std::exp(theta(0));
  const double psi1 = logistic_fn(theta(1));
  const double psi2 = logistic_fn(theta(2));
  const double alpha = psi1 * (1.0 - psi2);
  const double beta = psi1 * psi2;
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw NumericalError("garch_log_joint: exp(theta_w) left (0, inf)");
  }

  const double s1 = sigma1_sq ? *sigma1_sq : sample_variance(y);
  if (!(s1 > 0.0) || !std::isfinite(s1)) {
    throw NumericalError("garch_log_joint: invalid initial variance");
  }
  double sig2 = s1;
  double ll = -0.5 * (kLog2Pi + std::log(sig2)) - 0.5 * y(0) * y(0) / sig2;
  for (Eigen::Index t = 1; t < n; ++t) {
    sig2 = w + alpha * sig2 + beta * y(t - 1) * y(t - 1);
    if (!(sig2 > 0.0) || !std::isfinite(sig2)) {
      throw NumericalError("garch_log_joint: variance recursion left (0, inf)");
    }
    ll += -0.5 * (kLog2Pi + std::log(sig2)) - 0.5 * y(t) * y(t) / sig2;
  }

  // Priors on the constrained scale: IG(1,1) for w (density w^{-2} e^{-1/w}),
  // U(0,1) for each psi (zero).  Transform Jacobian: dw/dtheta_w = w and
  // dpsi/dtheta_psi = psi(1-psi).
  const double log_prior = -2.0 * std::log(w) - 1.0 / w;
  const double log_jacobian = std::log(w) + std::log(psi1 * (1.0 - psi1)) +
                              std::log(psi2 * (1.0 - psi2));
  return ll + log_prior + log_jacobian;
}

double gaussian_cov_log_joint(const SpdPoint& v, const Eigen::MatrixXd& data,
                              double nu0, const SpdPoint& s0) {
  const int d = static_cast<int>(v.dim());
  if (data.cols() != d || s0.dim() != d) {
    throw PreconditionError("gaussian_cov_log_joint: dimension mismatch");
  }
  if (!(nu0 > d - 1)) {
    throw PreconditionError("gaussian_cov_log_joint: need nu0 > d - 1");
  }
  const double n = static_cast<double>(data.rows());
  const Eigen::MatrixXd syy = data.transpose() * data;

  const SpdSolve vs(v.matrix());
  const SpdSolve s0s(s0.matrix());
  const double log_lik = -0.5 * n * d * kLog2Pi - 0.5 * n * vs.log_det -
                         0.5 * vs.trace_inverse_product(syy);
  const double log_prior = 0.5 * nu0 * s0s.log_det -
                           0.5 * nu0 * d * std::log(2.0) -
                           multivariate_log_gamma(d, 0.5 * nu0) -
                           0.5 * (nu0 + d + 1.0) * vs.log_det -
                           0.5 * vs.trace_inverse_product(s0.matrix());
  return log_lik + log_prior;
}

WishartVariationalParams exact_iw_posterior(double nu0, const SpdPoint& s0,
                                            const Eigen::MatrixXd& data) {
  if (data.cols() != s0.dim()) {
    throw PreconditionError("exact_iw_posterior: dimension mismatch");
  }
  const Eigen::MatrixXd scale =
      s0.matrix() + data.transpose() * data;
  return WishartVariationalParams(nu0 + static_cast<double>(data.rows()),
                                  SpdPoint(scale));
}

double gaussian_cov_log_marginal(double nu0, const SpdPoint& s0,
                                 const Eigen::MatrixXd& data) {
  const int d = static_cast<int>(s0.dim());
  if (data.cols() != d) {
    throw PreconditionError("gaussian_cov_log_marginal: dimension mismatch");
  }
  const double n = static_cast<double>(data.rows());
  const double nu_n = nu0 + n;
  const Eigen::MatrixXd sn = s0.matrix() + data.transpose() * data;
  const SpdSolve s0s(s0.matrix());
  const SpdSolve sns(sn);
  return -0.5 * n * d * std::log(M_PI) + 0.5 * nu0 * s0s.log_det -
         0.5 * nu_n * sns.log_det + multivariate_log_gamma(d, 0.5 * nu_n) -
         multivariate_log_gamma(d, 0.5 * nu0);
}

ModelSpec make_logistic_model(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y,
                              double prior_variance) {
  if (y.size() != x.rows()) {
    throw PreconditionError("make_logistic_model: X and y row counts differ");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) {
      throw PreconditionError("make_logistic_model: responses must be 0/1");
    }
  }
  ModelSpec spec;
  spec.parameter_dimension = static_cast<int>(x.cols());
  spec.description = "logistic regression, N(0, " +
                     std::to_string(prior_variance) + " I) prior";
  spec.log_joint = [x, y, prior_variance](const Eigen::VectorXd& beta) {
    return logistic_log_joint(beta, x, y, prior_variance);
  };
  return spec;
}

ModelSpec make_garch_model(const Eigen::VectorXd& y,
                           std::optional<double> sigma1_sq) {
  if (y.size() < 2) {
    throw PreconditionError("make_garch_model: need at least 2 observations");
  }
  // Freeze sigma_1^2 once so every evaluation sees the same recursion start.
  const double s1 = sigma1_sq ? *sigma1_sq : sample_variance(y);
  ModelSpec spec;
  spec.parameter_dimension = 3;
  spec.description = "GARCH(1,1), unconstrained parameterization";
  spec.log_joint = [y, s1](const Eigen::VectorXd& theta) {
    return garch_log_joint(theta, y, s1);
  };
  return spec;
}

ModelSpec make_gaussian_cov_model(const Eigen::MatrixXd& data, double nu0,
                                  const SpdPoint& s0) {
  const int d = static_cast<int>(s0.dim());
  if (data.cols() != d) {
    throw PreconditionError("make_gaussian_cov_model: dimension mismatch");
  }
  if (!(nu0 > d - 1)) {
    throw PreconditionError("make_gaussian_cov_model: need nu0 > d - 1");
  }
  // Collapse likelihood + prior into sufficient statistics:
  //   const - ((n + nu0 + d + 1)/2) log|V| - (1/2) tr(V^{-1} (Syy + S0)).
  const double n = static_cast<double>(data.rows());
  const Eigen::MatrixXd a = s0.matrix() + data.transpose() * data;
  const SpdSolve s0s(s0.matrix());
  const double constant = -0.5 * n * d * kLog2Pi + 0.5 * nu0 * s0s.log_det -
                          0.5 * nu0 * d * std::log(2.0) -
                          multivariate_log_gamma(d, 0.5 * nu0);
  const double logdet_coeff = 0.5 * (n + nu0 + d + 1.0);

  ModelSpec spec;
  spec.parameter_dimension = d * d;
  spec.description = "zero-mean Gaussian with inverse-Wishart covariance prior";
  spec.log_joint = [d, a, constant, logdet_coeff](const Eigen::VectorXd& flat) {
    if (flat.size() != static_cast<Eigen::Index>(d) * d) {
      throw PreconditionError("gaussian_cov model: flat V has wrong length");
    }
    const Eigen::Map<const Eigen::MatrixXd> v(flat.data(), d, d);
    const SpdSolve vs(v);
    return constant - logdet_coeff * vs.log_det -
           0.5 * vs.trace_inverse_product(a);
  };
  return spec;
}

Dataset generate_synthetic(const SyntheticSpec& spec, int n,
                           std::uint64_t seed) {
  if (n < 1) {
    throw PreconditionError("generate_synthetic: need n >= 1");
  }
  Dataset out;
  if (spec.kind == "gaussian_cov") {
    const int d = spec.dimension;
    if (d < 1) throw PreconditionError("generate_synthetic: dimension >= 1");
    Eigen::MatrixXd v(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        v(i, j) = std::pow(-0.5, std::abs(i - j));
      }
    }
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(v).matrixL();
    out.observations.resize(n, d);
    for (int i = 0; i < n; ++i) {
      Rng r(derive_stream(seed, 1, static_cast<std::uint64_t>(i)));
      Eigen::VectorXd z(d);
      for (int k = 0; k < d; ++k) z(k) = r.normal();
      out.observations.row(i) = (l * z).transpose();
    }
    for (int k = 0; k < d; ++k) {
      out.column_names.push_back("y" + std::to_string(k + 1));
    }
  } else if (spec.kind == "garch") {
    const double w = spec.garch_w;
    const double alpha = spec.garch_alpha;
    const double beta = spec.garch_beta;
    if (!(w > 0.0) || alpha < 0.0 || beta < 0.0 || alpha + beta >= 1.0) {
      throw PreconditionError(
          "generate_synthetic: garch needs w > 0 and alpha + beta < 1");
    }
    Rng r(derive_stream(seed, 2));
    out.observations.resize(n, 1);
    double sig2 = w / (1.0 - alpha - beta);  // stationary variance
    double y_prev = 0.0;
    for (int t = 0; t < n; ++t) {
      if (t > 0) sig2 = w + alpha * sig2 + beta * y_prev * y_prev;
      y_prev = std::sqrt(sig2) * r.normal();
      out.observations(t, 0) = y_prev;
    }
    out.column_names = {"y"};
  } else if (spec.kind == "logistic") {
    const int d = spec.dimension;
    if (d < 1) throw PreconditionError("generate_synthetic: dimension >= 1");
    Eigen::VectorXd beta = spec.logistic_beta;
    if (beta.size() == 0) {
      Rng rb(derive_stream(seed, 3, 0));
      beta.resize(d);
      for (int k = 0; k < d; ++k) beta(k) = 0.5 * rb.normal();
    } else if (beta.size() != d) {
      throw PreconditionError(
          "generate_synthetic: logistic_beta length mismatch");
    }
    out.observations.resize(n, d + 1);
    for (int i = 0; i < n; ++i) {
      Rng r(derive_stream(seed, 3, static_cast<std::uint64_t>(i) + 1));
      Eigen::VectorXd x(d);
      for (int k = 0; k < d; ++k) x(k) = r.normal();
      const double p = logistic_fn(x.dot(beta));
      out.observations.row(i).head(d) = x.transpose();
      out.observations(i, d) = (r.uniform() <= p) ? 1.0 : 0.0;
    }
    for (int k = 0; k < d; ++k) {
      out.column_names.push_back("x" + std::to_string(k + 1));
    }
    out.column_names.push_back("y");
  } else {
    throw PreconditionError("generate_synthetic: unknown kind '" + spec.kind +
                            "'");
  }
  return out;
}

}  // namespace mvb
