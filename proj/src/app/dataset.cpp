#include "ggmlrt/app/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ggmlrt/app/format.hpp"
#include "ggmlrt/error.hpp"

namespace ggmlrt::app {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string location(const std::string& source, std::size_t line, std::size_t col,
                     const std::string& label) {
  std::ostringstream s;
  s << source << ": line " << line << ", column " << col << " (" << label << ")";
  return s.str();
}

}  // namespace

GroupTable parse_group_csv(std::string_view text, const std::string& source) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(source + ": file is empty");

  GroupTable table;
  for (const auto f : split_fields(lines[0])) {
    if (f.empty()) throw ParseError(source + ": line 1 has an empty node label");
    table.labels.emplace_back(f);
  }
  const std::size_t p = table.labels.size();

  std::vector<double> values;
  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    if (fields.size() != p) {
      std::ostringstream s;
      s << source << ": line " << i + 1 << " has " << fields.size() << " cells, expected " << p;
      throw ParseError(s.str());
    }
    for (std::size_t c = 0; c < p; ++c) {
      const std::string_view f = fields[c];
      if (f.empty()) throw ParseError(location(source, i + 1, c + 1, table.labels[c]) + " is empty");
      double v = 0.0;
      const char* first = f.data();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError(location(source, i + 1, c + 1, table.labels[c]) + " is not a finite number: '" +
                         std::string(f) + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  table.values = DenseMatrix(rows, p, std::move(values));
  return table;
}

GroupTable read_group_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_group_csv(buf.str(), path.string());
}

TwoSampleData parse_dataset(const std::filesystem::path& group1, const std::filesystem::path& group2) {
  GroupTable a = read_group_csv(group1);
  GroupTable b = read_group_csv(group2);
  if (a.labels != b.labels) {
    throw SchemaMismatch("label rows differ between " + group1.string() + " and " + group2.string());
  }
  if (a.values.rows() < 2) throw TooFewRows(group1.string() + " has fewer than 2 observations");
  if (b.values.rows() < 2) throw TooFewRows(group2.string() + " has fewer than 2 observations");
  return TwoSampleData(std::move(a.values), std::move(b.values), std::move(a.labels));
}

void write_group_csv(const std::filesystem::path& path, const std::vector<std::string>& labels,
                     const DenseMatrix& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t c = 0; c < labels.size(); ++c) out << (c ? "," : "") << labels[c];
  out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_number(values(r, c));
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace ggmlrt::app
