#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mvb/errors.hpp"
#include "mvb/estimators.hpp"
#include "mvb/manifold.hpp"
#include "mvb/models.hpp"
#include "mvb/variational_params.hpp"

namespace mvb {

/// How the degrees-of-freedom coordinate of the Wishart runner is stepped:
/// `natural` rescales the raw gradient by the inverse score variance
/// (1/4) psi'_d(nu/2) and feeds it through the shared momentum pipeline;
/// `adam` bypasses momentum for nu and applies a standard Adam step to the
/// raw gradient instead.
enum class NuUpdate { natural, adam };

struct OptimizerConfig {
  double learning_rate = 0.01;
  double momentum_weight = 0.9;
  MonteCarloConfig mc;
  int max_iterations = 2000;
  int patience = 50;
  int smoothing_window = 10;
  NuUpdate nu_update = NuUpdate::natural;
};

/// Validates ranges (learning_rate > 0, momentum_weight in [0,1),
/// max_iterations >= 1, smoothing_window >= 1, patience >= 1).
void validate(const OptimizerConfig& config);

/// One row of an optimizer trace.  `smoothed_lower_bound` is the moving
/// average of the lower bound over the trailing `smoothing_window` records
/// (over all records available while the window is still filling).
/// `parameters` is the flat coordinate vector of the iterate.
struct TraceRecord {
  int iteration = 0;
  double lower_bound = 0.0;
  double smoothed_lower_bound = 0.0;
  double gradient_norm = 0.0;
  Eigen::VectorXd parameters;
};

/// Momentum direction on the product manifold: a Euclidean block (mu, or
/// nu) and an SPD tangent block (Sigma, or Sigma_q) anchored at the current
/// iterate.
struct MomentumState {
  Eigen::VectorXd euclidean;
  SpdTangent spd;
};

/// Convex momentum combination omega * transported + (1 - omega) * grad.
/// Both inputs must be anchored at the same SPD base point (the Euclidean
/// block transports trivially).
MomentumState momentum_update(const MomentumState& transported,
                              const MomentumState& grad, double omega);

/// True when the trailing-window moving average of the lower bound has gone
/// `patience` consecutive iterations without improving on its running
/// maximum.  Returns false while fewer than `window` records exist.
bool stopping_rule(const std::vector<TraceRecord>& trace, int window,
                   int patience);

/// Runs attempt(scale) with scale = initial_scale halved up to max_halvings
/// times; each StepRejected triggers the next halving, and the attempt after
/// the last allowed halving escalates to NumericalError.  Used to back off a
/// retraction that left the SPD cone; exposed for direct testing.
template <typename Attempt>
auto step_with_backoff(Attempt attempt, double initial_scale,
                       int max_halvings = 10) -> decltype(attempt(1.0)) {
  double scale = initial_scale;
  for (int halvings = 0;; ++halvings) {
    try {
      return attempt(scale);
    } catch (const StepRejected&) {
      if (halvings >= max_halvings) {
        throw NumericalError(
            "step rejected by the manifold retraction after repeated "
            "halving; the gradient estimate is likely diverging");
      }
      scale *= 0.5;
    }
  }
}

struct GvbResult {
  GaussianVariationalParams params;
  std::vector<TraceRecord> trace;
};

struct WvbResult {
  WishartVariationalParams params;
  std::vector<TraceRecord> trace;
};

/// Manifold Gaussian VB: score-function gradients with lagged control
/// variates, natural gradients (Sigma g_mu, Sigma G Sigma), momentum with
/// SPD vector transport for the Sigma block, Euclidean steps for mu and
/// second-order retraction steps for Sigma.  The momentum is initialized
/// with the first natural gradient.  Stops at max_iterations or when
/// stopping_rule fires; the trace has one record per evaluated iterate.
GvbResult run_manifold_gvb(const ModelSpec& model,
                           const GaussianVariationalParams& init,
                           const OptimizerConfig& config);

/// Manifold Wishart VB: the same loop over (nu_q, Sigma_q) with the
/// inverse-Wishart family; nu_q steps in the Euclidean direction (see
/// NuUpdate) and is clamped above d - 1 + 1e-6.
WvbResult run_manifold_wvb(const ModelSpec& model,
                           const WishartVariationalParams& init,
                           const OptimizerConfig& config);

}  // namespace mvb
