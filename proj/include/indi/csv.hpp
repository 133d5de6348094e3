#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace indi {

/// Header plus rows of already-formatted cells. Numbers use the shortest
/// representation that parses back to the same double; inf and nan are
/// written as "inf", "-inf", "nan".
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  size_t column(const std::string& name) const;  ///< throws std::out_of_range
  double number(size_t row, const std::string& name) const;
};

std::string csv_cell(double v);
std::string csv_cell(long long v);
std::string csv_cell(bool v);
inline std::string csv_cell(int v) { return csv_cell(static_cast<long long>(v)); }
inline std::string csv_cell(size_t v) { return csv_cell(static_cast<long long>(v)); }
inline std::string csv_cell(const std::string& v) { return v; }
inline std::string csv_cell(const char* v) { return v; }

void write_csv(const std::filesystem::path& path, const CsvTable& table);
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Parses a cell written by csv_cell(double), including inf and nan.
double parse_cell(const std::string& cell);

}  // namespace indi
