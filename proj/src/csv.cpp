#include "mvb/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace mvb {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("csv: cannot open '" + path + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("csv: '" + path + "' is empty (expected a header row)");
  }
  Dataset data;
  data.column_names = split_line(line);
  const std::size_t width = data.column_names.size();
  for (std::size_t c = 0; c < width; ++c) {
    if (data.column_names[c].empty()) {
      throw ConfigError("csv: '" + path + "' line 1: empty column name");
    }
  }

  std::vector<double> values;
  int line_number = 1;
  int rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != width) {
      throw ConfigError("csv: '" + path + "' line " +
                        std::to_string(line_number) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& cell = cells[c];
      double parsed = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ConfigError("csv: '" + path + "' line " +
                          std::to_string(line_number) + ": cell '" + cell +
                          "' in column '" + data.column_names[c] +
                          "' is not a number");
      }
      values.push_back(parsed);
    }
    ++rows;
  }

  data.observations.resize(rows, static_cast<Eigen::Index>(width));
  for (int r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      data.observations(r, static_cast<Eigen::Index>(c)) =
          values[static_cast<std::size_t>(r) * width + c];
    }
  }
  return data;
}

Eigen::Index column_index(const Dataset& data, const std::string& name) {
  for (std::size_t c = 0; c < data.column_names.size(); ++c) {
    if (data.column_names[c] == name) {
      return static_cast<Eigen::Index>(c);
    }
  }
  std::string have;
  for (std::size_t c = 0; c < data.column_names.size(); ++c) {
    if (c > 0) have += ", ";
    have += data.column_names[c];
  }
  throw ConfigError("csv: missing column '" + name + "' (file has: " + have +
                    ")");
}

std::string format_double(double value) {
  char buffer[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
    const double back = std::strtod(buffer, nullptr);
    if (back == value || (value != value && back != back)) {
      return buffer;
    }
  }
  return buffer;
}

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("csv: cannot open '" + tmp + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      throw ConfigError("csv: failed writing '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ConfigError("csv: cannot rename '" + tmp + "' to '" + path +
                      "': " + std::strerror(errno));
  }
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out << ',';
    out << header[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw PreconditionError("csv: row " + std::to_string(r) + " has " +
                              std::to_string(rows[r].size()) +
                              " cells but the header has " +
                              std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0) out << ',';
      out << rows[r][c];
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace mvb
