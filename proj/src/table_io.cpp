// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#include "shrinktm/table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace shrinktm {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, std::size_t line) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw DataError("line " + std::to_string(line) + ": '" + text + "' is not a number");
  if (!std::isfinite(value)) throw DataError("line " + std::to_string(line) + ": non-finite value");
  return value;
}

bool next_record(std::istream& in, std::string& line, std::size_t& number) {
  while (std::getline(in, line)) {
    ++number;
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

Locations read_locations(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  if (!next_record(in, line, number)) throw DataError("locations file is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.size() > 4 || header[0] != "id")
    throw DataError("locations header must be id,x[,y[,z]]");
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<std::string> ids;
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  while (next_record(in, line, number)) {
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("line " + std::to_string(number) + ": expected " + std::to_string(header.size()) + " fields");
    if (fields[0].empty()) throw DataError("line " + std::to_string(number) + ": empty id");
    if (!seen.insert(fields[0]).second) throw DataError("duplicate location id '" + fields[0] + "'");
    ids.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) values.push_back(parse_number(fields[k], number));
  }
  if (ids.empty()) throw DataError("locations file has no rows");
  Locations locs;
  locs.coords.resize(static_cast<Eigen::Index>(ids.size()), dim);
  for (Eigen::Index r = 0; r < locs.coords.rows(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c) locs.coords(r, c) = values[static_cast<std::size_t>(r * dim + c)];
  locs.ids = std::move(ids);
  return locs;
}

Locations read_locations_file(const std::string& path) {
  auto in = open_input(path);
  return read_locations(in);
}

void write_locations(std::ostream& out, const Locations& locs) {
  static const char* axes[] = {"x", "y", "z"};
  out << "id";
  for (int c = 0; c < locs.dim(); ++c) out << ',' << axes[c];
  out << '\n';
  out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t r = 0; r < locs.size(); ++r) {
    out << locs.ids[r];
    for (int c = 0; c < locs.dim(); ++c) out << ',' << locs.coords(static_cast<Eigen::Index>(r), c);
    out << '\n';
  }
}

Matrix read_data(std::istream& in, const Locations& locs) {
  std::string line;
  std::size_t number = 0;
  if (!next_record(in, line, number)) throw DataError("data file is empty");
  const auto header = split_csv_line(line);
  if (header.size() != locs.size())
    throw DataError("data has " + std::to_string(header.size()) + " columns but there are " +
                    std::to_string(locs.size()) + " locations");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < locs.size(); ++r) index.emplace(locs.ids[r], r);
  std::vector<std::size_t> column(header.size());
  std::unordered_set<std::size_t> used;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto it = index.find(header[c]);
    if (it == index.end()) throw DataError("data column '" + header[c] + "' is not a known location id");
    if (!used.insert(it->second).second) throw DataError("data column '" + header[c] + "' appears twice");
    column[c] = it->second;
  }
  std::vector<std::vector<double>> rows;
  while (next_record(in, line, number)) {
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("line " + std::to_string(number) + ": expected " + std::to_string(header.size()) + " fields");
    std::vector<double> row(header.size());
    for (std::size_t c = 0; c < fields.size(); ++c) row[column[c]] = parse_number(fields[c], number);
    rows.push_back(std::move(row));
  }
  Matrix y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < header.size(); ++c) y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return y;
}

Matrix read_data_file(const std::string& path, const Locations& locs) {
  auto in = open_input(path);
  return read_data(in, locs);
}

void write_data(std::ostream& out, const Matrix& y, const Locations& locs) {
  if (static_cast<std::size_t>(y.cols()) != locs.size()) throw DataError("data width does not match the locations");
  for (std::size_t c = 0; c < locs.size(); ++c) out << (c ? "," : "") << locs.ids[c];
  out << '\n';
  out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    for (Eigen::Index c = 0; c < y.cols(); ++c) out << (c ? "," : "") << y(r, c);
    out << '\n';
  }
}

}  // namespace shrinktm
