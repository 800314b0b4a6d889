#pragma once

#include <string>
#include <vector>

namespace igcn {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file with one header line. Fields are plain
/// (no quoting); surrounding whitespace is trimmed.
CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

/// Formats with 17 significant digits so values round-trip exactly.
std::string format_real(double v);

double parse_real(const std::string& field, const std::string& context);
long parse_integer(const std::string& field, const std::string& context);

}  // namespace igcn
