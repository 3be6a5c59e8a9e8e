#pragma once

namespace mvb {

/// Digamma psi(x) for x > 0.  Upward recurrence psi(x) = psi(x+1) - 1/x lifts
/// the argument above 10, then the Bernoulli asymptotic series is applied;
/// accurate to ~1e-14 relative over the positive axis.  log-gamma itself is
/// std::lgamma.
double digamma(double x);

/// Trigamma psi'(x) for x > 0, same recurrence-plus-series scheme.
double trigamma(double x);

/// log of the multivariate gamma function,
///   log Gamma_d(a) = d(d-1)/4 * log(pi) + sum_{j=1..d} log Gamma(a + (1-j)/2),
/// defined for a > (d-1)/2.
double multivariate_log_gamma(int d, double a);

/// Multivariate digamma: d/da log Gamma_d(a) = sum_j psi(a + (1-j)/2).
double multivariate_digamma(int d, double a);

/// Multivariate trigamma: second derivative, sum_j psi'(a + (1-j)/2).
double multivariate_trigamma(int d, double a);

}  // namespace mvb
