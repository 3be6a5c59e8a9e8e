#include "mvb/natural_gradient.hpp"

#include <vector>

#include "mvb/errors.hpp"
#include "mvb/parallel.hpp"
#include "mvb/special_functions.hpp"

namespace mvb {
namespace {

void require_symmetric_shape(const Eigen::MatrixXd& g, int d,
                             const char* what) {
  if (g.rows() != d || g.cols() != d) {
    throw PreconditionError(std::string(what) + ": gradient shape mismatch");
  }
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::MatrixXd> gaussian_natural_gradient(
    const GaussianVariationalParams& params, const Eigen::VectorXd& grad_mu,
    const Eigen::MatrixXd& grad_sigma) {
  const int d = params.dim();
  if (grad_mu.size() != d) {
    throw PreconditionError("gaussian_natural_gradient: grad_mu size mismatch");
  }
  require_symmetric_shape(grad_sigma, d, "gaussian_natural_gradient");
  const Eigen::MatrixXd& s = params.sigma.matrix();
  Eigen::MatrixXd nat_sigma = s * grad_sigma * s;
  nat_sigma = 0.5 * (nat_sigma + nat_sigma.transpose()).eval();
  return {s * grad_mu, nat_sigma};
}

Eigen::MatrixXd wishart_natural_gradient_sigma(
    const WishartVariationalParams& params,
    const Eigen::MatrixXd& grad_sigma) {
  const int d = params.dim();
  require_symmetric_shape(grad_sigma, d, "wishart_natural_gradient_sigma");
  const Eigen::MatrixXd& s = params.sigma_q.matrix();
  Eigen::MatrixXd nat = s * grad_sigma * s;
  return 0.5 * (nat + nat.transpose()).eval();
}

double wishart_natural_gradient_nu(const WishartVariationalParams& params,
                                   double grad_nu) {
  const double scale =
      4.0 / multivariate_trigamma(params.dim(), 0.5 * params.nu);
  return scale * grad_nu;
}

MultivariateSpecial multivariate_special(int d, double nu) {
  return {multivariate_log_gamma(d, nu), multivariate_digamma(d, nu),
          multivariate_trigamma(d, nu)};
}

FisherEstimate empirical_fisher(
    const std::function<Eigen::VectorXd(Rng&)>& score_sampler, int sample_count,
    std::uint64_t seed) {
  if (sample_count < 2) {
    throw PreconditionError("empirical_fisher: need at least 2 samples");
  }
  const std::int64_t s_count = sample_count;
  // Draw the first score serially to size the buffer, then fill the rest in
  // parallel; each sample owns a derived substream and its own row.
  Rng first(derive_stream(seed, 0, 0));
  const Eigen::VectorXd g0 = score_sampler(first);
  const int dim = static_cast<int>(g0.size());
  Eigen::MatrixXd scores(sample_count, dim);
  scores.row(0) = g0;
  parallel::parallel_for(s_count - 1, [&](std::int64_t idx) {
    const std::int64_t s = idx + 1;
    Rng r(derive_stream(seed, 0, static_cast<std::uint64_t>(s)));
    const Eigen::VectorXd g = score_sampler(r);
    if (g.size() != dim) {
      throw NumericalError("empirical_fisher: sampler dimension changed");
    }
    scores.row(s) = g;
  });

  Eigen::VectorXd mean(dim);
  for (int j = 0; j < dim; ++j) {
    mean(j) = parallel::pairwise_sum(scores.data() + j * sample_count,
                                     sample_count) /
              sample_count;
  }
  FisherEstimate est;
  est.sample_count = sample_count;
  est.matrix.resize(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const double* ci = scores.data() + i * sample_count;
      const double* cj = scores.data() + j * sample_count;
      const double mi = mean(i), mj = mean(j);
      const double cov =
          parallel::pairwise_sum(sample_count,
                                 [&](std::int64_t s) {
                                   return (ci[s] - mi) * (cj[s] - mj);
                                 }) /
          (sample_count - 1);
      est.matrix(i, j) = cov;
      est.matrix(j, i) = cov;
    }
  }
  return est;
}

}  // namespace mvb
