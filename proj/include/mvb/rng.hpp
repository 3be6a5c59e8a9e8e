#pragma once

#include <cstdint>

namespace mvb {

/// Counter-style pseudo-random generator built on the SplitMix64 mixing
/// function.  The state advances by a fixed odd increment and each output is a
/// bijective hash of the state, so any number of independent substreams can be
/// derived cheaply by hashing a (seed, label...) tuple into a fresh state (see
/// derive_stream below).  All variate transforms are implemented here rather
/// than with <random> distributions because the standard leaves distribution
/// algorithms implementation-defined; this class produces identical draws on
/// any platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Next raw 64-bit word.
  std::uint64_t next_u64();

  /// Uniform on (0, 1] (never returns 0, so log(uniform()) is finite).
  double uniform();

  /// Standard normal via the Box-Muller transform.  Draws are generated in
  /// pairs; the second element is cached, so a single Rng consumes uniforms
  /// deterministically regardless of how calls interleave with next_u64().
  double normal();

  /// Gamma(shape, 1) by Marsaglia-Tsang squeeze-and-accept; shape > 0,
  /// including shape < 1 via the boosting identity G(a) = G(a+1) * U^{1/a}.
  double gamma(double shape);

  /// Chi-squared with (possibly non-integer) dof > 0.
  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Hashes (seed, a, b, c) into an Rng seed.  Distinct tuples give streams that
/// are independent for practical purposes (full-avalanche 64-bit mixing).
/// Convention used throughout: a = iteration (or phase), b = sample index.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                            std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace mvb
