#include "mvb/special_functions.hpp"

#include <cmath>
#include <string>

#include "mvb/errors.hpp"

namespace mvb {
namespace {

constexpr double kLogPi = 1.1447298858494001741;
constexpr double kShift = 10.0;

void require_positive(double x, const char* name) {
  if (!(x > 0.0)) {
    throw PreconditionError(std::string(name) +
                            " requires a positive argument, got " +
                            std::to_string(x));
  }
}

void require_mv_domain(int d, double a, const char* name) {
  if (d < 1) {
    throw PreconditionError(std::string(name) + " requires d >= 1");
  }
  if (!(a > 0.5 * (d - 1))) {
    throw PreconditionError(std::string(name) + " requires a > (d-1)/2, got a=" +
                            std::to_string(a) + " with d=" + std::to_string(d));
  }
}

}  // namespace

double digamma(double x) {
  require_positive(x, "digamma");
  double result = 0.0;
  while (x < kShift) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum_n B_{2n} / (2n x^{2n}); truncated after the
  // x^{-12} term the error is below 1e-14 for x >= 10.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double p = inv2;
  double acc = -p / 12.0;  // -1/(12 x^2)
  p *= inv2;
  acc += p / 120.0;  // +1/(120 x^4)
  p *= inv2;
  acc -= p / 252.0;  // -1/(252 x^6)
  p *= inv2;
  acc += p / 240.0;  // +1/(240 x^8)
  p *= inv2;
  acc -= p / 132.0;  // -1/(132 x^10)
  p *= inv2;
  acc += p * (691.0 / 32760.0);  // +691/(32760 x^12)
  return result + std::log(x) - 0.5 * inv + acc;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double result = 0.0;
  while (x < kShift) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  // psi'(x) ~ 1/x + 1/(2x^2) + sum_n B_{2n} / x^{2n+1}.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double p = inv * inv2;          // x^{-3}
  double acc = inv + 0.5 * inv2;
  acc += p / 6.0;                 // +1/(6 x^3)
  p *= inv2;
  acc -= p / 30.0;                // -1/(30 x^5)
  p *= inv2;
  acc += p / 42.0;                // +1/(42 x^7)
  p *= inv2;
  acc -= p / 30.0;                // -1/(30 x^9)
  p *= inv2;
  acc += p * (5.0 / 66.0);        // +5/(66 x^11)
  p *= inv2;
  acc -= p * (691.0 / 2730.0);    // -691/(2730 x^13)
  return result + acc;
}

double multivariate_log_gamma(int d, double a) {
  require_mv_domain(d, a, "multivariate_log_gamma");
  double sum = 0.25 * d * (d - 1) * kLogPi;
  for (int j = 1; j <= d; ++j) {
    sum += std::lgamma(a + 0.5 * (1 - j));
  }
  return sum;
}

double multivariate_digamma(int d, double a) {
  require_mv_domain(d, a, "multivariate_digamma");
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) {
    sum += digamma(a + 0.5 * (1 - j));
  }
  return sum;
}

double multivariate_trigamma(int d, double a) {
  require_mv_domain(d, a, "multivariate_trigamma");
  double sum = 0.0;
  for (int j = 1; j <= d; ++j) {
    sum += trigamma(a + 0.5 * (1 - j));
  }
  return sum;
}

}  // namespace mvb
