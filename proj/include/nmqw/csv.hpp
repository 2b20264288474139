#pragma once

// Numeric CSV files: one header row, comma separated, LF line endings,
// values written with 12 significant digits.

#include <string>
#include <vector>

namespace nmqw {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// "%.12g"
std::string format_number(double v);

std::string to_csv(const CsvTable& table);
// Throws IoError with the path on failure.
void write_csv(const std::string& path, const CsvTable& table);
void write_text(const std::string& path, const std::string& text);

// Throws CsvError (with line number) on ragged rows or unparsable cells.
CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");
CsvTable read_csv(const std::string& path);

}  // namespace nmqw
