#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ixai {

// RFC 4180 table with a header row. Cells are kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws UserError when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ixai
