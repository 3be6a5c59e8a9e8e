#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mvb/errors.hpp"
#include "mvb/models.hpp"

namespace mvb {

/// Loads a comma-separated file with a mandatory header row into a Dataset.
/// Every body cell must parse as a floating-point number; cells are trimmed
/// of surrounding whitespace.  Quoting is not supported, so column names
/// must not contain commas.  Errors (unreadable file, empty file, ragged
/// row, unparseable cell) are reported as ConfigError with the 1-based line
/// number.
Dataset load_csv(const std::string& path);

/// Index of a named column, or ConfigError listing the columns present.
Eigen::Index column_index(const Dataset& data, const std::string& name);

/// Writes rows of preformatted cells as CSV.  The file is first written to
/// "<path>.tmp" and then renamed, so readers never observe a truncated
/// file.  Cells are written verbatim; use format_double for numeric cells.
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Shortest representation that round-trips a double exactly (printf %.17g
/// trimmed); used for every numeric cell so that re-running a deterministic
/// experiment reproduces files byte for byte.
std::string format_double(double value);

/// Writes `text` to "<path>.tmp" and renames it over `path` (atomic on the
/// same filesystem).  Shared by the CSV and JSON writers.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace mvb
