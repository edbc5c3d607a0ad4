#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gcops/colocalization.hpp"

namespace gcops::io {

// Nine significant digits; p-values below 1e-15 print as "<1e-15" in the
// human-readable report only.
std::string format_float(double v);

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws InvalidArgument
  std::string str() const;
  static Csv parse(const std::string& text);
};

// key=value lines, one per field, warnings as warning.<i>=...
std::string to_key_value(const TestReport& report);

std::vector<std::string> report_columns();
std::vector<std::string> report_row(const TestReport& report);
TestReport report_from_row(const Csv& table, std::size_t row);

// Field-wise comparison at the precision of the machine-readable record.
bool same_record(const TestReport& a, const TestReport& b);

std::string read_text(const std::filesystem::path& path);

}  // namespace gcops::io
