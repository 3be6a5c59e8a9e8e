#include <doctest.h>

#include <cmath>

#include "mvb/errors.hpp"
#include "mvb/rng.hpp"
#include "mvb/special_functions.hpp"

using mvb::digamma;
using mvb::multivariate_digamma;
using mvb::multivariate_log_gamma;
using mvb::multivariate_trigamma;
using mvb::trigamma;

TEST_CASE("special: classical values") {
  // psi(1) = -EulerMascheroni; psi(1/2) = -gamma - 2 ln 2;
  // psi(5) = 1 + 1/2 + 1/3 + 1/4 - gamma.
  constexpr double kEulerMascheroni = 0.57721566490153286061;
  CHECK(digamma(1.0) == doctest::Approx(-kEulerMascheroni).epsilon(1e-13));
  CHECK(digamma(0.5) ==
        doctest::Approx(-kEulerMascheroni - 2.0 * std::log(2.0))
            .epsilon(1e-13));
  CHECK(digamma(5.0) ==
        doctest::Approx(25.0 / 12.0 - kEulerMascheroni).epsilon(1e-13));
  // psi'(1) = pi^2/6; psi'(1/2) = pi^2/2.
  constexpr double kPiSqOver6 = 1.6449340668482264365;
  CHECK(trigamma(1.0) == doctest::Approx(kPiSqOver6).epsilon(1e-13));
  CHECK(trigamma(0.5) == doctest::Approx(3.0 * kPiSqOver6).epsilon(1e-13));
  CHECK(trigamma(5.0) ==
        doctest::Approx(kPiSqOver6 - 1.0 - 0.25 - 1.0 / 9.0 - 1.0 / 16.0)
            .epsilon(1e-12));
}

TEST_CASE("special: recurrence identities at random arguments") {
  mvb::Rng r(555);
  for (int i = 0; i < 200; ++i) {
    const double x = 0.05 + 30.0 * r.uniform();
    CHECK(digamma(x + 1.0) - digamma(x) ==
          doctest::Approx(1.0 / x).epsilon(1e-11));
    CHECK(trigamma(x) - trigamma(x + 1.0) ==
          doctest::Approx(1.0 / (x * x)).epsilon(1e-11));
  }
}

TEST_CASE("special: digamma matches finite differences of lgamma") {
  mvb::Rng r(556);
  for (int i = 0; i < 50; ++i) {
    const double x = 0.2 + 50.0 * r.uniform();
    const double h = 1e-6 * std::max(1.0, x);
    const double fd = (std::lgamma(x + h) - std::lgamma(x - h)) / (2.0 * h);
    CHECK(digamma(x) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("special: large arguments stay accurate and finite") {
  for (double x : {1e4, 1e6, 1e8}) {
    const double d = digamma(x);
    CHECK(std::isfinite(d));
    // psi(x) = ln x - 1/(2x) + O(x^-2).
    CHECK(std::abs(d - (std::log(x) - 0.5 / x)) < 1.0 / (x * x));
    const double t = trigamma(x);
    CHECK(std::isfinite(t));
    CHECK(std::abs(t - (1.0 / x + 0.5 / (x * x))) < 1.0 / (x * x * x));
  }
}

TEST_CASE("special: domain errors") {
  CHECK_THROWS_AS((void)digamma(0.0), mvb::PreconditionError);
  CHECK_THROWS_AS((void)digamma(-3.5), mvb::PreconditionError);
  CHECK_THROWS_AS((void)trigamma(-1e-9), mvb::PreconditionError);
  CHECK_THROWS_AS((void)multivariate_log_gamma(3, 1.0),
                  mvb::PreconditionError);
  CHECK_THROWS_AS((void)multivariate_digamma(5, 2.0), mvb::PreconditionError);
}

TEST_CASE("special: multivariate log gamma reduces correctly") {
  // d = 1 collapses to lgamma.
  CHECK(multivariate_log_gamma(1, 3.7) ==
        doctest::Approx(std::lgamma(3.7)).epsilon(1e-14));
  // d = 2, a = 2: (1/2) log(pi) + lgamma(2) + lgamma(1.5), frozen value.
  CHECK(multivariate_log_gamma(2, 2.0) ==
        doctest::Approx(0.4515827052894549).epsilon(1e-12));
  CHECK(multivariate_log_gamma(2, 2.0) ==
        doctest::Approx(0.5 * std::log(M_PI) + std::lgamma(2.0) +
                        std::lgamma(1.5))
            .epsilon(1e-14));
}

TEST_CASE("special: multivariate derivatives match finite differences") {
  mvb::Rng r(557);
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + static_cast<int>(r.uniform() * 8.0);
    const double a = 0.5 * (d - 1) + 0.3 + 20.0 * r.uniform();
    const double f_0 = multivariate_log_gamma(d, a);
    // Balance truncation (h^2 * f'''' / 12) against rounding (eps |f| / h^2):
    // the fourth derivative is dominated by the smallest lgamma argument.
    const double a_min = a - 0.5 * (d - 1);
    const double c4 = 6.0 / (a_min * a_min * a_min * a_min) + 1.0;
    double h = std::pow(48e-16 * std::max(1.0, std::abs(f_0)) / c4, 0.25);
    h = std::min(h, 0.5 * a_min);
    const double f_p = multivariate_log_gamma(d, a + h);
    const double f_m = multivariate_log_gamma(d, a - h);
    const double fd1 = (f_p - f_m) / (2.0 * h);
    const double fd2 = (f_p - 2.0 * f_0 + f_m) / (h * h);
    CHECK(multivariate_digamma(d, a) == doctest::Approx(fd1).epsilon(1e-6));
    CHECK(multivariate_trigamma(d, a) == doctest::Approx(fd2).epsilon(1e-6));
  }
}
