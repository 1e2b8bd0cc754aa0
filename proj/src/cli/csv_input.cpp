#include "hdloc/cli/csv_input.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace hdloc::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void cell_error(std::size_t row, std::size_t column, const std::string& what) {
  std::ostringstream msg;
  msg << "row " << row << ", column " << column << ": " << what;
  throw Error(msg.str());
}

}  // namespace

SampleMatrix parse_csv_matrix(std::istream& in, bool skip_header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (trim(line).empty()) continue;

    std::vector<double> values;
    std::string_view rest(line);
    std::size_t column = 0;
    for (;;) {
      ++column;
      const std::size_t comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        cell_error(line_no, column, "not a number: '" + std::string(cell) + "'");
      }
      if (!std::isfinite(value)) cell_error(line_no, column, "non-finite value");
      values.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows.empty()) {
      width = values.size();
    } else if (values.size() != width) {
      std::ostringstream msg;
      msg << "row " << line_no << ": expected " << width << " columns, found " << values.size();
      throw Error(msg.str());
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error("no data rows");

  Matrix data(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) data(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return SampleMatrix(std::move(data));
}

SampleMatrix read_csv_matrix(const std::filesystem::path& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open data file " + path.string());
  try {
    return parse_csv_matrix(in, skip_header);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace hdloc::cli
