#pragma once

#include <cstdint>
#include <functional>

namespace mvb::parallel {

/// Process-wide switch between the OpenMP path and the serial reference path.
/// Both paths execute the same per-element bodies and the same fixed-shape
/// reductions, so results are bit-identical either way (and for any thread
/// count); the switch exists so tests and benchmarks can compare them.
void set_enabled(bool enabled);
bool enabled();

/// Number of worker threads the parallel path would use right now.
int worker_count();

/// Runs body(i) for i in [0, n).  Iterations must be independent; each one
/// may only write state it owns (e.g. row i of a preallocated buffer).
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

/// Sum of term(i) over [0, n) with a fixed pairwise reduction tree (serial
/// blocks of 128 leaves, then pairwise combination).  The tree shape depends
/// only on n, never on threading, so sums are reproducible to the bit.
double pairwise_sum(std::int64_t n,
                    const std::function<double(std::int64_t)>& term);

/// Same reduction over a strided array: data[0], data[stride], ...
double pairwise_sum(const double* data, std::int64_t n, std::int64_t stride = 1);

}  // namespace mvb::parallel
