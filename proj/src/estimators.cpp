#include "mvb/estimators.hpp"

#include <cmath>

#include "mvb/errors.hpp"
#include "mvb/parallel.hpp"
#include "mvb/rng.hpp"
#include "mvb/special_functions.hpp"

namespace mvb {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Doubles the off-diagonal of a symmetric matrix gradient so its upper
// triangle reads as derivatives with respect to the free coordinates.
Eigen::VectorXd flatten_free_gradient(const Eigen::MatrixXd& g) {
  Eigen::MatrixXd doubled = 2.0 * g;
  doubled.diagonal() = g.diagonal();
  return flatten_upper_triangle(doubled);
}

// Frozen view of a Gaussian q_lambda: one Cholesky factorization shared by
// sampling, density, and score evaluations.
class GaussianFamily {
 public:
  explicit GaussianFamily(const GaussianVariationalParams& p)
      : mu_(p.mu), d_(static_cast<int>(p.mu.size())), llt_(p.sigma.matrix()) {
    if (llt_.info() != Eigen::Success) {
      throw NumericalError("gaussian family: covariance factorization failed");
    }
    log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    sigma_inv_ = llt_.solve(Eigen::MatrixXd::Identity(d_, d_));
  }

  int theta_dim() const { return d_; }
  int lambda_dim() const { return d_ + symmetric_free_count(d_); }

  Eigen::VectorXd sample(Rng& rng) const {
    Eigen::VectorXd z(d_);
    for (int k = 0; k < d_; ++k) z(k) = rng.normal();
    return mu_ + llt_.matrixL() * z;
  }

  double log_density(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd z = llt_.matrixL().solve(theta - mu_);
    return -0.5 * d_ * kLog2Pi - 0.5 * log_det_ - 0.5 * z.squaredNorm();
  }

  Eigen::VectorXd score_flat(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd u = llt_.solve(theta - mu_);
    const Eigen::MatrixXd g_sigma =
        0.5 * (u * u.transpose() - sigma_inv_);
    Eigen::VectorXd flat(lambda_dim());
    flat.head(d_) = u;
    flat.tail(symmetric_free_count(d_)) = flatten_free_gradient(g_sigma);
    return flat;
  }

 private:
  Eigen::VectorXd mu_;
  int d_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
  Eigen::MatrixXd sigma_inv_;
};

// Frozen view of an inverse-Wishart q_lambda.  theta is the d x d matrix V
// flattened in column order, matching the covariance-model evaluators.
class InverseWishartFamily {
 public:
  explicit InverseWishartFamily(const WishartVariationalParams& p)
      : nu_(p.nu),
        d_(static_cast<int>(p.sigma_q.dim())),
        sigma_q_(p.sigma_q.matrix()),
        llt_(sigma_q_) {
    if (llt_.info() != Eigen::Success) {
      throw NumericalError(
          "inverse-wishart family: scale factorization failed");
    }
    chol_lower_ = llt_.matrixL();
    log_det_sigma_q_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
    sigma_q_inv_ = llt_.solve(Eigen::MatrixXd::Identity(d_, d_));
    log_norm_const_ = 0.5 * nu_ * log_det_sigma_q_ -
                      0.5 * nu_ * d_ * std::log(2.0) -
                      multivariate_log_gamma(d_, 0.5 * nu_);
    half_mv_digamma_ = 0.5 * multivariate_digamma(d_, 0.5 * nu_);
  }

  int theta_dim() const { return d_ * d_; }
  int lambda_dim() const { return 1 + symmetric_free_count(d_); }

  // Bartlett construction: A lower triangular with chi draws on the diagonal
  // and standard normals below, consumed column by column (diagonal first);
  // then V = M^T M with A M = C^T, C the Cholesky factor of Sigma_q.
  Eigen::VectorXd sample(Rng& rng) const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d_, d_);
    for (int j = 0; j < d_; ++j) {
      a(j, j) = std::sqrt(rng.chi_squared(nu_ - j));
      for (int i = j + 1; i < d_; ++i) a(i, j) = rng.normal();
    }
    const Eigen::MatrixXd m =
        a.triangularView<Eigen::Lower>().solve(chol_lower_.transpose());
    const Eigen::MatrixXd v = m.transpose() * m;
    return Eigen::Map<const Eigen::VectorXd>(v.data(), d_ * d_);
  }

  double log_density(const Eigen::VectorXd& theta) const {
    const Eigen::Map<const Eigen::MatrixXd> v(theta.data(), d_, d_);
    Eigen::LLT<Eigen::MatrixXd> llt_v(v);
    if (llt_v.info() != Eigen::Success) {
      throw NumericalError("inverse-wishart density: V is not SPD");
    }
    const double log_det_v =
        2.0 * llt_v.matrixLLT().diagonal().array().log().sum();
    const double trace = llt_v.solve(sigma_q_).trace();
    return log_norm_const_ - 0.5 * (nu_ + d_ + 1.0) * log_det_v - 0.5 * trace;
  }

  Eigen::VectorXd score_flat(const Eigen::VectorXd& theta) const {
    const Eigen::Map<const Eigen::MatrixXd> v(theta.data(), d_, d_);
    Eigen::LLT<Eigen::MatrixXd> llt_v(v);
    if (llt_v.info() != Eigen::Success) {
      throw NumericalError("inverse-wishart score: V is not SPD");
    }
    const double log_det_v =
        2.0 * llt_v.matrixLLT().diagonal().array().log().sum();
    const Eigen::MatrixXd v_inv =
        llt_v.solve(Eigen::MatrixXd::Identity(d_, d_));
    const double g_nu = 0.5 * log_det_sigma_q_ - 0.5 * d_ * std::log(2.0) -
                        half_mv_digamma_ - 0.5 * log_det_v;
    const Eigen::MatrixXd g_sigma = 0.5 * (nu_ * sigma_q_inv_ - v_inv);
    Eigen::VectorXd flat(lambda_dim());
    flat(0) = g_nu;
    flat.tail(symmetric_free_count(d_)) = flatten_free_gradient(g_sigma);
    return flat;
  }

 private:
  double nu_;
  int d_;
  Eigen::MatrixXd sigma_q_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd chol_lower_;
  double log_det_sigma_q_ = 0.0;
  Eigen::MatrixXd sigma_q_inv_;
  double log_norm_const_ = 0.0;
  double half_mv_digamma_ = 0.0;
};

template <typename Family>
void check_model_dimension(const Family& family, const ModelSpec& model) {
  if (model.parameter_dimension != family.theta_dim()) {
    throw PreconditionError(
        "model parameter dimension does not match the variational family");
  }
  if (!model.log_joint) {
    throw PreconditionError("model has no log-joint evaluator");
  }
}

template <typename Family>
double lower_bound_with_family(const Family& family, const ModelSpec& model,
                               const MonteCarloConfig& config) {
  check_model_dimension(family, model);
  const int s_count = config.sample_count;
  if (s_count < 1) {
    throw PreconditionError("estimate_lower_bound: sample_count must be >= 1");
  }
  Eigen::VectorXd h(s_count);
  parallel::parallel_for(s_count, [&](std::int64_t s) {
    Rng rng(derive_stream(config.seed, 0, static_cast<std::uint64_t>(s)));
    const Eigen::VectorXd theta = family.sample(rng);
    h(s) = model.log_joint(theta) - family.log_density(theta);
  });
  return parallel::pairwise_sum(h.data(), s_count) /
         static_cast<double>(s_count);
}

template <typename Family>
BatchStats batch_with_family(const Family& family, const ModelSpec& model,
                             const MonteCarloConfig& config,
                             const Eigen::VectorXd& c_prev,
                             std::uint64_t iteration) {
  check_model_dimension(family, model);
  const int s_count = config.sample_count;
  if (s_count < 2) {
    throw PreconditionError(
        "score_function_gradient: sample_count must be >= 2");
  }
  const int dim = family.lambda_dim();
  if (c_prev.size() != dim) {
    throw PreconditionError(
        "control coefficient vector length does not match lambda");
  }

  // Stage 1: one RNG substream per sample; scores land in a column-major
  // S x dim matrix so stage 2 can reduce contiguous columns.
  Eigen::MatrixXd scores(s_count, dim);
  Eigen::VectorXd h(s_count);
  parallel::parallel_for(s_count, [&](std::int64_t s) {
    Rng rng(derive_stream(config.seed, iteration,
                          static_cast<std::uint64_t>(s)));
    const Eigen::VectorXd theta = family.sample(rng);
    h(s) = model.log_joint(theta) - family.log_density(theta);
    scores.row(s) = family.score_flat(theta).transpose();
  });

  // Stage 2: per-coordinate fixed-shape pairwise reductions, so results do
  // not depend on how either stage was scheduled.
  BatchStats out;
  out.lower_bound =
      parallel::pairwise_sum(h.data(), s_count) / static_cast<double>(s_count);
  out.gradient.value.resize(dim);
  out.gradient.control_coefficients.resize(dim);
  const double s_real = static_cast<double>(s_count);
  parallel::parallel_for(dim, [&](std::int64_t j) {
    const double* g = scores.data() + static_cast<std::size_t>(j) * s_count;
    const double c_in = c_prev(j);
    const double centered = parallel::pairwise_sum(
        s_count, [&](std::int64_t s) { return g[s] * (h(s) - c_in); });
    const double sum_g = parallel::pairwise_sum(g, s_count);
    const double sum_gh = parallel::pairwise_sum(
        s_count, [&](std::int64_t s) { return g[s] * h(s); });
    const double sum_g2 = parallel::pairwise_sum(
        s_count, [&](std::int64_t s) { return g[s] * g[s]; });
    const double sum_g2h = parallel::pairwise_sum(
        s_count, [&](std::int64_t s) { return g[s] * g[s] * h(s); });
    out.gradient.value(j) = centered / s_real;
    const double var_num = sum_g2 - sum_g * sum_g / s_real;
    const double cov_num = sum_g2h - sum_g * sum_gh / s_real;
    double c = 0.0;
    if (var_num > 0.0) c = cov_num / var_num;
    if (!std::isfinite(c)) c = 0.0;
    out.gradient.control_coefficients(j) = c;
  });

  if (!out.gradient.value.allFinite() || !std::isfinite(out.lower_bound)) {
    throw NumericalError("gradient estimate has non-finite entries");
  }
  return out;
}

}  // namespace

Eigen::MatrixXd sample_gaussian(const GaussianVariationalParams& params,
                                const MonteCarloConfig& config) {
  if (config.sample_count < 1) {
    throw PreconditionError("sample_gaussian: sample_count must be >= 1");
  }
  const GaussianFamily family(params);
  Eigen::MatrixXd draws(config.sample_count, family.theta_dim());
  parallel::parallel_for(config.sample_count, [&](std::int64_t s) {
    Rng rng(derive_stream(config.seed, 0, static_cast<std::uint64_t>(s)));
    draws.row(s) = family.sample(rng).transpose();
  });
  return draws;
}

double gaussian_log_density(const GaussianVariationalParams& params,
                            const Eigen::VectorXd& theta) {
  const GaussianFamily family(params);
  if (theta.size() != family.theta_dim()) {
    throw PreconditionError("gaussian_log_density: dimension mismatch");
  }
  return family.log_density(theta);
}

Eigen::VectorXd gaussian_score(const GaussianVariationalParams& params,
                               const Eigen::VectorXd& theta) {
  const GaussianFamily family(params);
  if (theta.size() != family.theta_dim()) {
    throw PreconditionError("gaussian_score: dimension mismatch");
  }
  return family.score_flat(theta);
}

std::vector<SpdPoint> sample_inverse_wishart(
    const WishartVariationalParams& params, const MonteCarloConfig& config) {
  if (config.sample_count < 1) {
    throw PreconditionError(
        "sample_inverse_wishart: sample_count must be >= 1");
  }
  const InverseWishartFamily family(params);
  const int d = static_cast<int>(params.sigma_q.dim());
  std::vector<Eigen::MatrixXd> raw(config.sample_count);
  parallel::parallel_for(config.sample_count, [&](std::int64_t s) {
    Rng rng(derive_stream(config.seed, 0, static_cast<std::uint64_t>(s)));
    const Eigen::VectorXd flat = family.sample(rng);
    raw[s] = Eigen::Map<const Eigen::MatrixXd>(flat.data(), d, d);
  });
  std::vector<SpdPoint> draws;
  draws.reserve(raw.size());
  for (const auto& v : raw) draws.emplace_back(v);
  return draws;
}

double inverse_wishart_log_density(const WishartVariationalParams& params,
                                   const SpdPoint& v) {
  const InverseWishartFamily family(params);
  const Eigen::MatrixXd& m = v.matrix();
  if (m.rows() * m.cols() != family.theta_dim()) {
    throw PreconditionError("inverse_wishart_log_density: dimension mismatch");
  }
  return family.log_density(
      Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()));
}

std::pair<double, Eigen::MatrixXd> inverse_wishart_score(
    const WishartVariationalParams& params, const SpdPoint& v) {
  const int d = static_cast<int>(params.sigma_q.dim());
  if (v.dim() != d) {
    throw PreconditionError("inverse_wishart_score: dimension mismatch");
  }
  const InverseWishartFamily family(params);
  const Eigen::MatrixXd& m = v.matrix();
  const Eigen::VectorXd flat = family.score_flat(
      Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()));
  return {flat(0), symmetric_gradient_from_free(
                       flat.tail(symmetric_free_count(d)), d)};
}

double estimate_lower_bound(const ModelSpec& model,
                            const GaussianVariationalParams& params,
                            const MonteCarloConfig& config) {
  return lower_bound_with_family(GaussianFamily(params), model, config);
}

double estimate_lower_bound(const ModelSpec& model,
                            const WishartVariationalParams& params,
                            const MonteCarloConfig& config) {
  return lower_bound_with_family(InverseWishartFamily(params), model, config);
}

GradientEstimate score_function_gradient(
    const ModelSpec& model, const GaussianVariationalParams& params,
    const MonteCarloConfig& config, const Eigen::VectorXd& c_prev,
    std::uint64_t iteration) {
  return batch_with_family(GaussianFamily(params), model, config, c_prev,
                           iteration)
      .gradient;
}

GradientEstimate score_function_gradient(
    const ModelSpec& model, const WishartVariationalParams& params,
    const MonteCarloConfig& config, const Eigen::VectorXd& c_prev,
    std::uint64_t iteration) {
  return batch_with_family(InverseWishartFamily(params), model, config, c_prev,
                           iteration)
      .gradient;
}

BatchStats estimate_gradient(const ModelSpec& model,
                             const GaussianVariationalParams& params,
                             const MonteCarloConfig& config,
                             const Eigen::VectorXd& c_prev,
                             std::uint64_t iteration) {
  return batch_with_family(GaussianFamily(params), model, config, c_prev,
                           iteration);
}

BatchStats estimate_gradient(const ModelSpec& model,
                             const WishartVariationalParams& params,
                             const MonteCarloConfig& config,
                             const Eigen::VectorXd& c_prev,
                             std::uint64_t iteration) {
  return batch_with_family(InverseWishartFamily(params), model, config, c_prev,
                           iteration);
}

}  // namespace mvb
