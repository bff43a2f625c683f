#include "tarlm/series_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace tarlm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string{}
                         : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) {
    return false;
  }
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc{} && result.ptr == last;
}

bool is_integer(const std::string& text) {
  return !text.empty() &&
         std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

TimeSeries read_series_csv(const SeriesFile& file) {
  std::ifstream in(file.path);
  if (!in) {
    throw IoError("cannot open series file: " + file.path);
  }

  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    rows.emplace_back(line_no, split_csv_line(line));
  }
  if (rows.empty()) {
    throw IoError("no data rows in series file: " + file.path);
  }

  // Header detection: if the first data line has any field that does not
  // parse as a number, treat it as a header.
  std::size_t col = 0;
  bool has_header = false;
  {
    const auto& first = rows.front().second;
    double tmp = 0.0;
    has_header = std::any_of(first.begin(), first.end(),
                             [&](const std::string& f) {
                               return !parse_double(f, tmp);
                             });
  }
  if (is_integer(file.column)) {
    col = static_cast<std::size_t>(std::stoull(file.column));
  } else {
    if (!has_header) {
      throw IoError("column '" + file.column +
                    "' requested by name but the file has no header: " +
                    file.path);
    }
    const auto& header = rows.front().second;
    const auto it = std::find(header.begin(), header.end(), file.column);
    if (it == header.end()) {
      throw IoError("column '" + file.column + "' not found in header of " +
                    file.path);
    }
    col = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t i = has_header ? 1 : 0; i < rows.size(); ++i) {
    const auto& [source_line, fields] = rows[i];
    if (col >= fields.size()) {
      throw IoError(file.path + ": line " + std::to_string(source_line) +
                    " has no column " + std::to_string(col));
    }
    double value = 0.0;
    if (!parse_double(fields[col], value) || !std::isfinite(value)) {
      throw IoError(file.path + ": line " + std::to_string(source_line) +
                    ", column " + std::to_string(col) +
                    ": not a finite number: '" + fields[col] + "'");
    }
    if (file.sqrt_transform) {
      if (value < 0.0) {
        throw IoError(file.path + ": line " + std::to_string(source_line) +
                      ", column " + std::to_string(col) +
                      ": sqrt transform needs nonnegative values");
      }
      value = std::sqrt(value);
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw IoError("no numeric rows in series file: " + file.path);
  }
  return TimeSeries(std::move(values), file.path);
}

}  // namespace tarlm
