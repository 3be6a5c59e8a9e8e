#pragma once

#include "mvb/config.hpp"

namespace mvb {

/// Runs the configured command end to end: resolves the dataset (CSV file or
/// synthetic recipe), builds the model, executes the requested algorithm and
/// writes the result files into config.output_dir, creating the directory
/// when missing.  Files per command:
///  - run-gvb:        trace.csv, summary.json
///  - run-wvb:        trace.csv, summary.json, comparison.csv (variational
///                    moments against the exact conjugate posterior)
///  - rate-check:     rate.csv (per-replication statistics), rate_summary.json
///  - generate-data:  data.csv
/// All files are written atomically, and every numeric cell uses a
/// round-trip-exact decimal form, so a rerun with the same config and seed
/// reproduces each file byte for byte (timing off).
void run_experiment(const ExperimentConfig& config);

}  // namespace mvb
