// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "shrinktm/common.hpp"
#include "shrinktm/geometry.hpp"

namespace shrinktm {

/// Locations CSV: header `id,x[,y[,z]]`, one row per location. ids must be unique.
Locations read_locations(std::istream& in);
Locations read_locations_file(const std::string& path);
void write_locations(std::ostream& out, const Locations& locs);

/// Data CSV: header lists location ids, one row per replicate. Columns are matched
/// to `locs` by id, so the returned n x N matrix follows the row order of `locs`.
Matrix read_data(std::istream& in, const Locations& locs);
Matrix read_data_file(const std::string& path, const Locations& locs);
/// y is n x N in the row order of `locs`.
void write_data(std::ostream& out, const Matrix& y, const Locations& locs);

/// Splits one CSV line on commas and trims surrounding blanks. No quoting.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace shrinktm
