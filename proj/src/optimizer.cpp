#include "mvb/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "mvb/natural_gradient.hpp"
#include "mvb/special_functions.hpp"

namespace mvb {
namespace {

// Trailing moving average of the lower bound while the trace is building.
double smoothed_tail(const std::vector<TraceRecord>& trace, double latest,
                     int window) {
  const int have = static_cast<int>(trace.size());
  const int take = std::min(window - 1, have);
  double total = latest;
  for (int k = 0; k < take; ++k) {
    total += trace[have - 1 - k].lower_bound;
  }
  return total / static_cast<double>(take + 1);
}

void push_record(std::vector<TraceRecord>& trace, int iteration,
                 double lower_bound, double gradient_norm,
                 Eigen::VectorXd parameters, int window) {
  TraceRecord rec;
  rec.iteration = iteration;
  rec.lower_bound = lower_bound;
  rec.smoothed_lower_bound = smoothed_tail(trace, lower_bound, window);
  rec.gradient_norm = gradient_norm;
  rec.parameters = std::move(parameters);
  trace.push_back(std::move(rec));
}

// The retraction R_S(xi) = S + xi + (1/2) xi S^{-1} xi is contractive only
// while the affine-invariant length of xi stays small; past roughly two
// metric units the quadratic term amplifies the step instead, so a single
// noisy natural gradient (whose scale grows with |Sigma|^2) can start a
// self-reinforcing blow-up that never trips the Cholesky-failure backoff.
// Steps are therefore clipped to this whitened length, which leaves a 4x
// margin and still allows eigenvalues to change by a factor e^0.65 per
// iteration; near a stationary point the clip is inactive.
constexpr double kMaxWhitenedStep = 0.5;

// Factor in (0, 1] that rescales the Sigma block so that
// |learning_rate * S^{-1/2} xi S^{-1/2}|_F <= kMaxWhitenedStep.
double spd_step_clip(const SpdPoint& s, const Eigen::MatrixXd& xi,
                     double learning_rate) {
  const Eigen::LLT<Eigen::MatrixXd> llt(s.matrix());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("optimizer: iterate left the SPD cone");
  }
  const Eigen::MatrixXd half = llt.matrixL().solve(xi);
  const double whitened =
      llt.matrixL().solve(half.transpose()).norm();
  const double step = learning_rate * whitened;
  if (step <= kMaxWhitenedStep) return 1.0;
  return kMaxWhitenedStep / step;
}

// Same trust region for a Euclidean block, with `metric_norm` the length of
// the proposed direction in that block's information metric (Sigma^{-1} for
// mu, (1/4) psi'_d(nu/2) for nu).  Keeps a single outsized Monte Carlo
// estimate from teleporting the iterate many posterior standard deviations.
double euclidean_step_clip(double metric_norm, double learning_rate) {
  const double step = learning_rate * metric_norm;
  if (!(step > kMaxWhitenedStep)) return 1.0;
  return kMaxWhitenedStep / step;
}

// sqrt(v' S^{-1} v): length of a mu-direction in the Gaussian family's
// information metric at covariance S.
double sigma_metric_norm(const SpdPoint& s, const Eigen::VectorXd& v) {
  const Eigen::LLT<Eigen::MatrixXd> llt(s.matrix());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("optimizer: iterate left the SPD cone");
  }
  return llt.matrixL().solve(v).norm();
}

// First-moment/second-moment state for the Adam variant of the nu step.
struct AdamState {
  double m = 0.0;
  double v = 0.0;
  int t = 0;

  double direction(double g) {
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++t;
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g * g;
    const double m_hat = m / (1.0 - std::pow(kBeta1, t));
    const double v_hat = v / (1.0 - std::pow(kBeta2, t));
    return m_hat / (std::sqrt(v_hat) + kEps);
  }
};

}  // namespace

void validate(const OptimizerConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw PreconditionError("optimizer: learning_rate must be > 0");
  }
  if (!(config.momentum_weight >= 0.0 && config.momentum_weight < 1.0)) {
    throw PreconditionError("optimizer: momentum_weight must be in [0, 1)");
  }
  if (config.max_iterations < 1) {
    throw PreconditionError("optimizer: max_iterations must be >= 1");
  }
  if (config.smoothing_window < 1) {
    throw PreconditionError("optimizer: smoothing_window must be >= 1");
  }
  if (config.patience < 1) {
    throw PreconditionError("optimizer: patience must be >= 1");
  }
  if (config.mc.sample_count < 2) {
    throw PreconditionError(
        "optimizer: mc.sample_count must be >= 2 (control-variate "
        "coefficients need a sample variance)");
  }
}

MomentumState momentum_update(const MomentumState& transported,
                              const MomentumState& grad, double omega) {
  if (!transported.spd.base().same_as(grad.spd.base())) {
    throw PreconditionError(
        "momentum update: tangents are anchored at different points");
  }
  if (transported.euclidean.size() != grad.euclidean.size()) {
    throw PreconditionError("momentum update: euclidean blocks differ in size");
  }
  return {omega * transported.euclidean + (1.0 - omega) * grad.euclidean,
          SpdTangent(omega * transported.spd.value() +
                         (1.0 - omega) * grad.spd.value(),
                     grad.spd.base())};
}

bool stopping_rule(const std::vector<TraceRecord>& trace, int window,
                   int patience) {
  if (window < 1 || patience < 1) {
    throw PreconditionError("stopping rule: window and patience must be >= 1");
  }
  const int n = static_cast<int>(trace.size());
  if (n < window) return false;

  double window_sum = 0.0;
  for (int k = 0; k < window; ++k) window_sum += trace[k].lower_bound;
  double running_max = window_sum / window;
  int streak = 0;
  for (int k = window; k < n; ++k) {
    window_sum += trace[k].lower_bound - trace[k - window].lower_bound;
    const double avg = window_sum / window;
    if (avg > running_max) {
      running_max = avg;
      streak = 0;
    } else if (++streak >= patience) {
      return true;
    }
  }
  return false;
}

GvbResult run_manifold_gvb(const ModelSpec& model,
                           const GaussianVariationalParams& init,
                           const OptimizerConfig& config) {
  validate(config);
  if (model.parameter_dimension != init.dim()) {
    throw PreconditionError("manifold gvb: model/init dimension mismatch");
  }
  const int d = init.dim();
  const int free_count = symmetric_free_count(d);

  GaussianVariationalParams current = init;
  std::vector<TraceRecord> trace;
  trace.reserve(config.max_iterations);

  auto natural_at = [&](const GaussianVariationalParams& p,
                        const Eigen::VectorXd& flat) {
    return gaussian_natural_gradient(
        p, flat.head(d),
        symmetric_gradient_from_free(flat.tail(free_count), d));
  };

  BatchStats batch = estimate_gradient(
      model, current, config.mc, Eigen::VectorXd::Zero(init.lambda_dim()), 0);
  auto [nat_mu, nat_sigma] = natural_at(current, batch.gradient.value);
  MomentumState momentum{nat_mu, SpdTangent(nat_sigma, current.sigma)};
  Eigen::VectorXd controls = batch.gradient.control_coefficients;
  push_record(trace, 1, batch.lower_bound,
              std::sqrt(nat_mu.squaredNorm() + nat_sigma.squaredNorm()),
              current.flatten(), config.smoothing_window);

  for (int t = 2;
       t <= config.max_iterations &&
       !stopping_rule(trace, config.smoothing_window, config.patience);
       ++t) {
    const double clip =
        spd_step_clip(current.sigma, momentum.spd.value(),
                      config.learning_rate);
    const double mu_clip = euclidean_step_clip(
        sigma_metric_norm(current.sigma, momentum.euclidean),
        config.learning_rate);
    const GaussianVariationalParams next = step_with_backoff(
        [&](double scale) {
          const SpdPoint sigma_new = spd_retract(
              current.sigma,
              SpdTangent(scale * clip * momentum.spd.value(), current.sigma));
          return GaussianVariationalParams(
              current.mu + scale * mu_clip * momentum.euclidean, sigma_new);
        },
        config.learning_rate);

    const SpdTangent transported =
        spd_transport(current.sigma, next.sigma, momentum.spd);
    batch = estimate_gradient(model, next, config.mc, controls,
                              static_cast<std::uint64_t>(t) - 1);
    auto [g_mu, g_sigma] = natural_at(next, batch.gradient.value);
    const MomentumState grad{g_mu, SpdTangent(g_sigma, next.sigma)};
    momentum = momentum_update({momentum.euclidean, transported}, grad,
                               config.momentum_weight);
    controls = batch.gradient.control_coefficients;
    current = next;
    push_record(trace, t, batch.lower_bound,
                std::sqrt(g_mu.squaredNorm() + g_sigma.squaredNorm()),
                current.flatten(), config.smoothing_window);
  }
  return {current, std::move(trace)};
}

WvbResult run_manifold_wvb(const ModelSpec& model,
                           const WishartVariationalParams& init,
                           const OptimizerConfig& config) {
  validate(config);
  const int d = init.dim();
  if (model.parameter_dimension != d * d) {
    throw PreconditionError("manifold wvb: model/init dimension mismatch");
  }
  const int free_count = symmetric_free_count(d);
  const double nu_floor = static_cast<double>(d) - 1.0 + 1e-6;

  WishartVariationalParams current = init;
  std::vector<TraceRecord> trace;
  trace.reserve(config.max_iterations);
  AdamState adam;
  const bool use_adam = config.nu_update == NuUpdate::adam;

  // Effective (nu, Sigma_q) ascent direction for this iteration.
  auto direction_at = [&](const WishartVariationalParams& p,
                          const Eigen::VectorXd& flat) {
    const double g_nu = flat(0);
    const Eigen::MatrixXd g_sigma =
        symmetric_gradient_from_free(flat.tail(free_count), d);
    const double dir_nu = use_adam ? adam.direction(g_nu)
                                   : wishart_natural_gradient_nu(p, g_nu);
    return std::make_pair(dir_nu, wishart_natural_gradient_sigma(p, g_sigma));
  };

  BatchStats batch = estimate_gradient(
      model, current, config.mc, Eigen::VectorXd::Zero(init.lambda_dim()), 0);
  auto [dir_nu, dir_sigma] = direction_at(current, batch.gradient.value);
  Eigen::VectorXd nu_block(1);
  nu_block << dir_nu;
  MomentumState momentum{nu_block, SpdTangent(dir_sigma, current.sigma_q)};
  Eigen::VectorXd controls = batch.gradient.control_coefficients;
  push_record(trace, 1, batch.lower_bound,
              std::sqrt(dir_nu * dir_nu + dir_sigma.squaredNorm()),
              current.flatten(), config.smoothing_window);

  for (int t = 2;
       t <= config.max_iterations &&
       !stopping_rule(trace, config.smoothing_window, config.patience);
       ++t) {
    const double nu_step = momentum.euclidean(0);
    const double clip =
        spd_step_clip(current.sigma_q, momentum.spd.value(),
                      config.learning_rate);
    const double nu_clip = euclidean_step_clip(
        std::abs(nu_step) *
            std::sqrt(0.25 * multivariate_trigamma(d, 0.5 * current.nu)),
        config.learning_rate);
    const WishartVariationalParams next = step_with_backoff(
        [&](double scale) {
          const SpdPoint sigma_new = spd_retract(
              current.sigma_q,
              SpdTangent(scale * clip * momentum.spd.value(),
                         current.sigma_q));
          const double nu_new =
              std::max(current.nu + scale * nu_clip * nu_step, nu_floor);
          return WishartVariationalParams(nu_new, sigma_new);
        },
        config.learning_rate);

    const SpdTangent transported =
        spd_transport(current.sigma_q, next.sigma_q, momentum.spd);
    batch = estimate_gradient(model, next, config.mc, controls,
                              static_cast<std::uint64_t>(t) - 1);
    auto [g_nu, g_sigma] = direction_at(next, batch.gradient.value);
    Eigen::VectorXd grad_nu_block(1);
    grad_nu_block << g_nu;
    const MomentumState grad{grad_nu_block, SpdTangent(g_sigma, next.sigma_q)};
    if (use_adam) {
      // nu: pure Adam direction; Sigma_q: the usual momentum average.
      const MomentumState averaged = momentum_update(
          {momentum.euclidean, transported}, grad, config.momentum_weight);
      momentum = {grad_nu_block, averaged.spd};
    } else {
      momentum = momentum_update({momentum.euclidean, transported}, grad,
                                 config.momentum_weight);
    }
    controls = batch.gradient.control_coefficients;
    current = next;
    push_record(trace, t, batch.lower_bound,
                std::sqrt(g_nu * g_nu + g_sigma.squaredNorm()),
                current.flatten(), config.smoothing_window);
  }
  return {current, std::move(trace)};
}

}  // namespace mvb
