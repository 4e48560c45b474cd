#pragma once

#include <istream>
#include <string>
#include <vector>

namespace toxblend::dataset {

/// Comma-separated text with a header row. Fields may be double-quoted, with
/// "" as an escaped quote and embedded newlines allowed inside quotes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name; throws DataError "column not found: <name>".
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Quotes a field only when it needs it.
std::string csv_escape(const std::string& field);

}  // namespace toxblend::dataset
