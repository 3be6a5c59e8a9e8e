#include "mvb/sgd_harness.hpp"

#include <cmath>

namespace mvb {

namespace {

// Eigendecomposition of an SPD matrix with a positivity check; returns the
// solver so callers can form functions of the eigenvalues.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spd_eigen(
    const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw NumericalError(std::string("sgd harness: eigendecomposition of ") +
                         what + " failed");
  }
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw NumericalError(std::string("sgd harness: ") + what +
                         " is not positive definite");
  }
  return eig;
}

}  // namespace

void validate(const SgdSchedule& schedule) {
  if (!(schedule.zeta >= 0.0 && schedule.zeta < 1.0)) {
    throw PreconditionError("sgd schedule: zeta must be in [0, 1)");
  }
  if (!(schedule.gamma > 0.0 && schedule.gamma <= 1.0)) {
    throw PreconditionError("sgd schedule: gamma must be in (0, 1]");
  }
  if (schedule.horizon < 1) {
    throw PreconditionError("sgd schedule: horizon must be >= 1");
  }
  if (!(schedule.noise_bound >= 0.0) ||
      !std::isfinite(schedule.noise_bound)) {
    throw PreconditionError(
        "sgd schedule: noise_bound must be finite and >= 0");
  }
  if (!(schedule.epsilon_exponent > 0.0 && schedule.epsilon_exponent < 1.0)) {
    throw PreconditionError(
        "sgd schedule: epsilon_exponent must be in (0, 1)");
  }
}

double truncated_normal(Rng& rng, double bound) {
  if (bound == 0.0) return 0.0;
  const double scale = 0.5 * bound;
  double z = scale * rng.normal();
  while (std::abs(z) > bound) z = scale * rng.normal();
  return z;
}

QuadraticCostProblem::QuadraticCostProblem(Eigen::VectorXd target,
                                           Eigen::VectorXd start,
                                           double curvature)
    : target_(std::move(target)),
      start_(std::move(start)),
      curvature_(curvature) {
  if (target_.size() != start_.size()) {
    throw PreconditionError(
        "quadratic problem: target and start dimensions differ");
  }
  if (!(curvature_ > 0.0)) {
    throw PreconditionError("quadratic problem: curvature must be > 0");
  }
}

QuadraticCostProblem::Tangent QuadraticCostProblem::sample_noise(
    const Point&, double bound, Rng& rng) const {
  Eigen::VectorXd noise(target_.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) {
    noise(i) = truncated_normal(rng, bound);
  }
  return noise;
}

SpdLogDistanceProblem::SpdLogDistanceProblem(SpdPoint target, SpdPoint start)
    : target_(std::move(target)), start_(std::move(start)) {
  if (target_.dim() != start_.dim()) {
    throw PreconditionError(
        "spd log-distance problem: target and start dimensions differ");
  }
}

SpdLogDistanceProblem::Tangent SpdLogDistanceProblem::cost_gradient(
    const Point& s) const {
  const auto eig = spd_eigen(s.matrix(), "the iterate");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd u = eig.eigenvectors();
  const Eigen::MatrixXd s_half = u * root.asDiagonal() * u.transpose();
  const Eigen::MatrixXd s_half_inv =
      u * root.cwiseInverse().asDiagonal() * u.transpose();

  Eigen::MatrixXd inner = s_half_inv * target_.matrix() * s_half_inv;
  inner = 0.5 * (inner + inner.transpose()).eval();
  const auto inner_eig = spd_eigen(inner, "the whitened target");
  const Eigen::MatrixXd log_inner =
      inner_eig.eigenvectors() *
      inner_eig.eigenvalues().array().log().matrix().asDiagonal() *
      inner_eig.eigenvectors().transpose();

  Eigen::MatrixXd grad = -(s_half * log_inner * s_half);
  grad = 0.5 * (grad + grad.transpose()).eval();
  return SpdTangent(grad, s);
}

SpdLogDistanceProblem::Tangent SpdLogDistanceProblem::combine(
    double a, const Tangent& u, double b, const Tangent& v) const {
  if (!u.base().same_as(v.base())) {
    throw PreconditionError(
        "spd log-distance problem: combining tangents at different points");
  }
  return SpdTangent(a * u.value() + b * v.value(), u.base());
}

double SpdLogDistanceProblem::norm(const Point& s, const Tangent& v) const {
  const auto eig = spd_eigen(s.matrix(), "the iterate");
  const Eigen::MatrixXd s_half_inv =
      eig.eigenvectors() *
      eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      eig.eigenvectors().transpose();
  return (s_half_inv * v.value() * s_half_inv).norm();
}

double SpdLogDistanceProblem::distance_sq(const Point& s) const {
  const auto eig = spd_eigen(s.matrix(), "the iterate");
  const Eigen::MatrixXd s_half_inv =
      eig.eigenvectors() *
      eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      eig.eigenvectors().transpose();
  Eigen::MatrixXd inner = s_half_inv * target_.matrix() * s_half_inv;
  inner = 0.5 * (inner + inner.transpose()).eval();
  const auto inner_eig = spd_eigen(inner, "the whitened target");
  return inner_eig.eigenvalues().array().log().square().sum();
}

SpdLogDistanceProblem::Tangent SpdLogDistanceProblem::sample_noise(
    const Point& s, double bound, Rng& rng) const {
  const Eigen::Index d = s.dim();
  Eigen::MatrixXd noise(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      const double z = truncated_normal(rng, bound);
      noise(i, j) = z;
      noise(j, i) = z;
    }
  }
  return SpdTangent(noise, s);
}

void validate_rate_config(const RateCheckConfig& config) {
  if (config.horizons.empty()) {
    throw PreconditionError("rate check: horizons must be non-empty");
  }
  int prev = 0;
  for (int t : config.horizons) {
    if (t < 1) throw PreconditionError("rate check: horizons must be >= 1");
    if (t <= prev) {
      throw PreconditionError(
          "rate check: horizons must be strictly increasing");
    }
    prev = t;
  }
  if (config.replications < 1) {
    throw PreconditionError("rate check: replications must be >= 1");
  }
  if (!(config.zeta >= 0.0 && config.zeta < 1.0)) {
    throw PreconditionError("rate check: zeta must be in [0, 1)");
  }
  if (!(config.noise_bound >= 0.0) || !std::isfinite(config.noise_bound)) {
    throw PreconditionError("rate check: noise_bound must be finite and >= 0");
  }
  if (!(config.epsilon_exponent > 0.0 && config.epsilon_exponent < 1.0)) {
    throw PreconditionError("rate check: epsilon_exponent must be in (0, 1)");
  }
}

std::pair<double, double> fit_log_log_slope(const std::vector<int>& horizons,
                                            const std::vector<double>& stats) {
  const int n = static_cast<int>(horizons.size());
  if (n != static_cast<int>(stats.size()) || n < 2) {
    throw PreconditionError(
        "rate fit: need at least two (horizon, statistic) pairs");
  }
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    if (!(stats[i] > 0.0) || !std::isfinite(stats[i])) {
      throw NumericalError(
          "rate fit: statistics must be strictly positive to take logs; got "
          "a non-positive or non-finite value");
    }
    x[i] = std::log(static_cast<double>(horizons[i]));
    y[i] = std::log(stats[i]);
  }
  double x_bar = 0.0, y_bar = 0.0;
  for (int i = 0; i < n; ++i) {
    x_bar += x[i];
    y_bar += y[i];
  }
  x_bar /= n;
  y_bar /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - x_bar) * (x[i] - x_bar);
    sxy += (x[i] - x_bar) * (y[i] - y_bar);
  }
  const double slope = sxy / sxx;
  double stderr_ = 0.0;
  if (n > 2) {
    const double intercept = y_bar - slope * x_bar;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double resid = y[i] - intercept - slope * x[i];
      rss += resid * resid;
    }
    stderr_ = std::sqrt(rss / (n - 2) / sxx);
  }
  return {slope, stderr_};
}

}  // namespace mvb
