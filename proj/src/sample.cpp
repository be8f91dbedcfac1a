#include "unimodal/sample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "unimodal/error.hpp"

namespace unimodal {

Sample Sample::from_values(std::vector<double> values,
                           std::size_t dropped_missing) {
  if (values.empty()) {
    throw Error(ErrorKind::empty_sample, "no observations left to test");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::validation,
                  "observation " + std::to_string(i) + " is not finite");
    }
  }
  std::sort(values.begin(), values.end());
  return Sample(std::move(values), dropped_missing);
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](char x, char y) {
                      return std::tolower(static_cast<unsigned char>(x)) ==
                             std::tolower(static_cast<unsigned char>(y));
                    });
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool looks_like_header(const std::vector<std::string_view>& cells) {
  return std::any_of(cells.begin(), cells.end(), [](std::string_view c) {
    return !is_missing_token(c) && !parse_number(c).has_value();
  });
}

}  // namespace

bool is_missing_token(std::string_view cell) noexcept {
  cell = trim(cell);
  return cell.empty() || iequals(cell, "NA") || iequals(cell, "NaN");
}

Sample load_sample(std::istream& in, const LoadOptions& options) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) {
    throw Error(ErrorKind::empty_sample, "input contains no data");
  }

  char delim = options.delimiter;
  if (delim == 0) {
    delim = lines.front().find('\t') != std::string::npos ? '\t' : ',';
  }

  const auto first = split(lines.front(), delim);
  const bool by_name = options.column.has_value() &&
                       std::holds_alternative<std::string>(*options.column);
  bool has_header = false;
  switch (options.header) {
    case HeaderMode::present: has_header = true; break;
    case HeaderMode::absent: has_header = false; break;
    case HeaderMode::detect: has_header = by_name || looks_like_header(first); break;
  }
  if (by_name && !has_header) {
    throw Error(ErrorKind::usage,
                "a column can only be selected by name when a header is present");
  }

  std::size_t column = 0;
  if (!options.column.has_value()) {
    if (first.size() > 1) {
      throw Error(ErrorKind::dimensionality,
                  "the data set must be one-dimensional but has " +
                      std::to_string(first.size()) +
                      " columns; select a single column");
    }
  } else if (by_name) {
    const auto& name = std::get<std::string>(*options.column);
    const auto it = std::find(first.begin(), first.end(), name);
    if (it == first.end()) {
      throw Error(ErrorKind::usage, "column '" + name + "' not found in header");
    }
    column = static_cast<std::size_t>(it - first.begin());
  } else {
    column = std::get<std::size_t>(*options.column);
    if (column >= first.size()) {
      throw Error(ErrorKind::usage, "column index " + std::to_string(column) +
                                        " is out of range (" +
                                        std::to_string(first.size()) +
                                        " columns)");
    }
  }

  std::vector<double> values;
  values.reserve(lines.size());
  std::size_t missing = 0;
  for (std::size_t row = has_header ? 1 : 0; row < lines.size(); ++row) {
    const auto cells = split(lines[row], delim);
    const std::size_t line_no = row + 1;
    if (column >= cells.size()) {
      throw Error(ErrorKind::validation, "line " + std::to_string(line_no) +
                                             " has no cell in the selected column");
    }
    const auto cell = cells[column];
    if (is_missing_token(cell)) {
      ++missing;
      continue;
    }
    const auto value = parse_number(cell);
    if (!value) {
      throw Error(ErrorKind::validation,
                  "non-numeric data found at line " + std::to_string(line_no) +
                      ": '" + std::string(cell) + "'; the test is not run");
    }
    if (!std::isfinite(*value)) {
      throw Error(ErrorKind::validation,
                  "non-finite value at line " + std::to_string(line_no));
    }
    values.push_back(*value);
  }

  if (missing > 0 && !options.complete_case) {
    throw Error(ErrorKind::missing_data,
                std::to_string(missing) +
                    " missing value(s) present; enable complete-case analysis "
                    "to ignore them");
  }
  if (values.empty()) {
    throw Error(ErrorKind::empty_sample, "no observations left after removing missing values");
  }
  return Sample::from_values(std::move(values), missing);
}

Sample load_sample(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  }
  return load_sample(in, options);
}

double sample_mean(std::span<const double> values) noexcept {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_sd(const Sample& s) {
  if (s.size() < 2) {
    throw Error(ErrorKind::degenerate_sample,
                "standard deviation needs at least two observations");
  }
  const auto v = s.values();
  const double mean = sample_mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace unimodal
