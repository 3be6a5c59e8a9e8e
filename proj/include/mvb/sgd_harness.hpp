#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "mvb/errors.hpp"
#include "mvb/manifold.hpp"
#include "mvb/parallel.hpp"
#include "mvb/rng.hpp"

namespace mvb {

/// Settings for one momentum SGD run in analysis form.  The recursion is
///
///   Y_{t+1}      = zeta * T_{t->t+1}(Y_t) + gamma * (grad L(x_{t+1}) + N_{t+1})
///   lambda_{t+1} = R_{lambda_t}(-Y_t)
///
/// written in cost/minimization convention, where T is the problem's vector
/// transport, R its retraction and N a bounded mean-zero noise term.  Y_0 is
/// seeded with gamma * (grad L(lambda_0) + N_0).
struct SgdSchedule {
  /// Momentum carry-over zeta in [0, 1).  Zero disables momentum, which
  /// reduces the scheme to (Riemannian) gradient descent.
  double zeta = 0.5;
  /// Step scale gamma in (0, 1].
  double gamma = 0.1;
  /// Number of steps T >= 1.
  int horizon = 100;
  /// Per-coordinate truncation level for the noise term; 0 disables noise.
  double noise_bound = 1.0;
  /// Exponent for the decaying schedule gamma = T^{-eps} used by the
  /// strongly convex rate family; must lie in (0, 1).
  double epsilon_exponent = 0.5;
};

void validate(const SgdSchedule& schedule);

/// Per-iteration records of one run.  Entry t of gradient_norms /
/// distances_sq describes the post-step iterate lambda_{t+1}; entry t of
/// momentum_norms is |Y_t| measured at lambda_t just before the step that
/// consumes it; drive_norms holds |grad + noise| for every increment fed
/// into Y (index 0 is the one that seeds Y_0).
struct SgdRunRecord {
  Eigen::VectorXd gradient_norms;
  Eigen::VectorXd distances_sq;
  Eigen::VectorXd momentum_norms;
  Eigen::VectorXd drive_norms;
};

/// Draws from a mean-zero Gaussian with standard deviation bound/2,
/// redrawing until the value lies in [-bound, bound].  A bound of zero
/// returns exactly zero (noise disabled).
double truncated_normal(Rng& rng, double bound);

/// Euclidean test problem L(x) = (curvature/2) |x - target|^2 with additive
/// per-coordinate truncated Gaussian noise.  Closed-form minimizer makes the
/// recorded distance and gradient exact.
class QuadraticCostProblem {
 public:
  using Point = Eigen::VectorXd;
  using Tangent = Eigen::VectorXd;

  QuadraticCostProblem(Eigen::VectorXd target, Eigen::VectorXd start,
                       double curvature);

  const Point& start() const { return start_; }
  Tangent cost_gradient(const Point& x) const {
    return curvature_ * (x - target_);
  }
  Point retract(const Point& x, const Tangent& v) const { return x + v; }
  Tangent transport(const Point&, const Point&, const Tangent& v) const {
    return v;
  }
  Tangent combine(double a, const Tangent& u, double b,
                  const Tangent& v) const {
    return a * u + b * v;
  }
  double norm(const Point&, const Tangent& v) const { return v.norm(); }
  double distance_sq(const Point& x) const {
    return (x - target_).squaredNorm();
  }
  Tangent sample_noise(const Point&, double bound, Rng& rng) const;

 private:
  Eigen::VectorXd target_;
  Eigen::VectorXd start_;
  double curvature_;
};

/// SPD-manifold test problem: L(S) = 1/2 d(S, S*)^2 where d is the
/// affine-invariant distance (Frobenius norm of the log-eigenvalues of
/// S^{-1/2} S* S^{-1/2}).  The Riemannian gradient is -Log_S(S*), so the
/// gradient norm equals the distance and the minimizer is exactly S*.
/// Noise draws a symmetric matrix of per-coordinate truncated Gaussians.
class SpdLogDistanceProblem {
 public:
  using Point = SpdPoint;
  using Tangent = SpdTangent;

  SpdLogDistanceProblem(SpdPoint target, SpdPoint start);

  const Point& start() const { return start_; }
  Tangent cost_gradient(const Point& s) const;
  Point retract(const Point& s, const Tangent& v) const {
    return spd_retract(s, v);
  }
  Tangent transport(const Point& from, const Point& to,
                    const Tangent& v) const {
    return spd_transport(from, to, v);
  }
  Tangent combine(double a, const Tangent& u, double b,
                  const Tangent& v) const;
  /// Affine-invariant norm |S^{-1/2} v S^{-1/2}|_F, the metric the
  /// transport preserves.
  double norm(const Point& s, const Tangent& v) const;
  double distance_sq(const Point& s) const;
  Tangent sample_noise(const Point& s, double bound, Rng& rng) const;

 private:
  SpdPoint target_;
  SpdPoint start_;
};

/// Executes the recursion for schedule.horizon steps from problem.start().
/// Noise for step t is drawn from the substream (seed, t, 0), so runs are
/// reproducible and independent of threading.  Numerical failures inside
/// problem callbacks (e.g. a rejected retraction) propagate unchanged.
template <typename Problem>
SgdRunRecord run_sgd_scheme(const Problem& problem,
                            const SgdSchedule& schedule, std::uint64_t seed) {
  validate(schedule);
  const int t_max = schedule.horizon;
  SgdRunRecord rec;
  rec.gradient_norms.resize(t_max);
  rec.distances_sq.resize(t_max);
  rec.momentum_norms.resize(t_max);
  rec.drive_norms.resize(t_max + 1);

  typename Problem::Point lambda = problem.start();
  Rng r0(derive_stream(seed, 0, 0));
  typename Problem::Tangent g0 = problem.cost_gradient(lambda);
  typename Problem::Tangent n0 =
      problem.sample_noise(lambda, schedule.noise_bound, r0);
  typename Problem::Tangent drive = problem.combine(1.0, g0, 1.0, n0);
  rec.drive_norms(0) = problem.norm(lambda, drive);
  typename Problem::Tangent y =
      problem.combine(schedule.gamma, drive, 0.0, drive);

  for (int t = 0; t < t_max; ++t) {
    rec.momentum_norms(t) = problem.norm(lambda, y);
    const typename Problem::Point next =
        problem.retract(lambda, problem.combine(-1.0, y, 0.0, y));
    const typename Problem::Tangent g = problem.cost_gradient(next);
    rec.gradient_norms(t) = problem.norm(next, g);
    rec.distances_sq(t) = problem.distance_sq(next);

    Rng rt(derive_stream(seed, static_cast<std::uint64_t>(t) + 1, 0));
    const typename Problem::Tangent dm =
        problem.sample_noise(next, schedule.noise_bound, rt);
    const typename Problem::Tangent step_drive = problem.combine(1.0, g, 1.0, dm);
    rec.drive_norms(t + 1) = problem.norm(next, step_drive);
    y = problem.combine(schedule.zeta, problem.transport(lambda, next, y),
                        schedule.gamma, step_drive);
    lambda = next;
  }
  return rec;
}

/// Which decay rate is being probed, and hence which step schedule and
/// summary statistic are used:
///  - nonconvex: gamma = T^{-1/2}; statistic is min over t of the
///    cross-replication mean of |grad L(lambda_{t+1})|^2.
///  - strongly_convex: gamma = T^{-epsilon_exponent}; statistic is the
///    cross-replication mean of the squared distance of the final iterate
///    to the minimizer.
enum class RateFamily { nonconvex, strongly_convex };

/// Decay estimate over a grid of horizons: the per-horizon statistics and
/// the least-squares slope (with standard error) of log statistic against
/// log horizon.
struct RateEstimate {
  std::vector<int> horizons;
  std::vector<double> statistics;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
};

/// Per-replication summaries, one row per horizon and one column per
/// replication: each entry is that single run's own statistic (its min over
/// t of the squared gradient norm, or its final squared distance).  These
/// feed the per-replication CSV output; note that averaging per-run minima
/// systematically undershoots the min-of-mean statistic used for the fit,
/// so they are diagnostics rather than the fitted quantity.
struct RateSamples {
  std::vector<int> horizons;
  Eigen::MatrixXd by_replication;
};

struct RateCheckConfig {
  std::vector<int> horizons;
  int replications = 20;  // >= 1 enforced; >= 20 recommended for stable fits
  double zeta = 0.5;
  double noise_bound = 1.0;
  double epsilon_exponent = 0.5;
  std::uint64_t seed = 0;
};

void validate_rate_config(const RateCheckConfig& config);

/// Least-squares slope of log(statistic) against log(horizon); stderr is the
/// usual regression standard error (zero when only two points are fitted).
/// Throws NumericalError if any statistic is not strictly positive.
std::pair<double, double> fit_log_log_slope(const std::vector<int>& horizons,
                                            const std::vector<double>& stats);

/// Runs `config.replications` seeded runs per horizon (replication r of
/// horizon index h uses seed derive_stream(config.seed, h, r)), aggregates
/// the family's statistic, and fits the log-log slope.  Replications execute
/// in parallel into per-replication slots; the reduction is a fixed serial
/// order, so results are bitwise independent of the thread count.
template <typename Problem>
RateEstimate estimate_rate(const Problem& problem, RateFamily family,
                           const RateCheckConfig& config,
                           RateSamples* samples = nullptr) {
  validate_rate_config(config);
  const int reps = config.replications;
  const int n_h = static_cast<int>(config.horizons.size());

  RateEstimate estimate;
  estimate.horizons = config.horizons;
  estimate.statistics.resize(n_h);
  if (samples != nullptr) {
    samples->horizons = config.horizons;
    samples->by_replication.resize(n_h, reps);
  }

  for (int h = 0; h < n_h; ++h) {
    const int t_max = config.horizons[h];
    SgdSchedule schedule;
    schedule.zeta = config.zeta;
    schedule.noise_bound = config.noise_bound;
    schedule.epsilon_exponent = config.epsilon_exponent;
    schedule.horizon = t_max;
    const double exponent = family == RateFamily::nonconvex
                                ? 0.5
                                : config.epsilon_exponent;
    schedule.gamma = std::pow(static_cast<double>(t_max), -exponent);

    if (family == RateFamily::nonconvex) {
      // Per-replication gradient-norm series, filled in parallel, then a
      // serial mean-over-replications before the min over t.
      Eigen::MatrixXd grad_sq(reps, t_max);
      parallel::parallel_for(reps, [&](int r) {
        const SgdRunRecord rec = run_sgd_scheme(
            problem, schedule,
            derive_stream(config.seed, static_cast<std::uint64_t>(h),
                          static_cast<std::uint64_t>(r)));
        grad_sq.row(r) = rec.gradient_norms.array().square().matrix();
      });
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < t_max; ++t) {
        double sum = 0.0;
        for (int r = 0; r < reps; ++r) sum += grad_sq(r, t);
        best = std::min(best, sum / reps);
      }
      estimate.statistics[h] = best;
      if (samples != nullptr) {
        for (int r = 0; r < reps; ++r) {
          samples->by_replication(h, r) = grad_sq.row(r).minCoeff();
        }
      }
    } else {
      Eigen::VectorXd finals(reps);
      parallel::parallel_for(reps, [&](int r) {
        const SgdRunRecord rec = run_sgd_scheme(
            problem, schedule,
            derive_stream(config.seed, static_cast<std::uint64_t>(h),
                          static_cast<std::uint64_t>(r)));
        finals(r) = rec.distances_sq(t_max - 1);
      });
      double sum = 0.0;
      for (int r = 0; r < reps; ++r) sum += finals(r);
      estimate.statistics[h] = sum / reps;
      if (samples != nullptr) samples->by_replication.row(h) = finals;
    }
  }

  const auto [slope, stderr_] =
      fit_log_log_slope(estimate.horizons, estimate.statistics);
  estimate.fitted_slope = slope;
  estimate.slope_stderr = stderr_;
  return estimate;
}

}  // namespace mvb
