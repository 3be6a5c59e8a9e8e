#include <doctest.h>

#include <numeric>
#include <vector>

#include "mvb/parallel.hpp"
#include "mvb/rng.hpp"
#include "support/test_support.hpp"

namespace par = mvb::parallel;
using mvb::testing::ParallelGuard;

TEST_CASE("parallel: pairwise sum matches plain accumulation") {
  mvb::Rng r(404);
  for (int n : {1, 2, 127, 128, 129, 1000, 4096, 12345}) {
    std::vector<double> x(n);
    for (auto& v : x) v = r.normal() * 1e3;
    const double plain = std::accumulate(x.begin(), x.end(), 0.0);
    const double pw = par::pairwise_sum(x.data(), n);
    CHECK(pw == doctest::Approx(plain).epsilon(1e-12));
    // Functional and pointer forms walk the same tree, so agree exactly.
    const double fn = par::pairwise_sum(
        n, [&](std::int64_t i) { return x[static_cast<std::size_t>(i)]; });
    CHECK(pw == fn);
  }
}

TEST_CASE("parallel: strided pairwise sum selects the right elements") {
  const int n = 500, stride = 3;
  std::vector<double> x(static_cast<std::size_t>(n) * stride, 0.0);
  mvb::Rng r(7);
  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) {
    col[i] = r.uniform();
    x[static_cast<std::size_t>(i) * stride] = col[i];
  }
  CHECK(par::pairwise_sum(x.data(), n, stride) ==
        par::pairwise_sum(col.data(), n, 1));
}

TEST_CASE("parallel: serial and parallel paths produce identical buffers") {
  ParallelGuard guard;
  const std::int64_t n = 2000;
  auto fill = [&](std::vector<double>& out) {
    out.assign(n, 0.0);
    par::parallel_for(n, [&](std::int64_t i) {
      mvb::Rng r(mvb::derive_stream(99, 1, static_cast<std::uint64_t>(i)));
      out[static_cast<std::size_t>(i)] = r.normal() + r.gamma(2.0);
    });
  };
  std::vector<double> serial, parallel;
  par::set_enabled(false);
  fill(serial);
  par::set_enabled(true);
  fill(parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::int64_t i = 0; i < n; ++i) {
    CHECK(serial[static_cast<std::size_t>(i)] ==
          parallel[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("parallel: worker count reflects the switch") {
  ParallelGuard guard;
  par::set_enabled(false);
  CHECK(par::worker_count() == 1);
  par::set_enabled(true);
  CHECK(par::worker_count() >= 1);
}
