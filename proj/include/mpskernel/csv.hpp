#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mpsk {

/// A parsed numeric CSV: header row plus a dense value matrix.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Reads an RFC-4180-style numeric CSV (comma separated, header row
/// required, CRLF tolerated). Every data row must match the header width.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes a CSV with full double round-trip precision.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);

std::string format_double(double v);

}  // namespace mpsk
