#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ggmlrt/lrt.hpp"

namespace ggmlrt::app {

// Reads one group: first row node labels, then one observation per row.
// Throws ParseError naming the row/column of the first bad cell.
struct GroupTable {
  std::vector<std::string> labels;
  DenseMatrix values;
};
GroupTable parse_group_csv(std::string_view text, const std::string& source_name);
GroupTable read_group_csv(const std::filesystem::path& path);

// Both files must carry the identical label row (SchemaMismatch otherwise)
// and at least two observations each (TooFewRows).
TwoSampleData parse_dataset(const std::filesystem::path& group1, const std::filesystem::path& group2);

void write_group_csv(const std::filesystem::path& path, const std::vector<std::string>& labels,
                     const DenseMatrix& values);

}  // namespace ggmlrt::app
