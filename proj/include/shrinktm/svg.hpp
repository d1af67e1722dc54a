// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <string>

#include "shrinktm/common.hpp"
#include "shrinktm/geometry.hpp"

namespace shrinktm {

/// Symmetric color limit max(|P1|, |P99|) over all entries of the training data.
double color_limit(const Matrix& training);

/// Heatmap of one field (values in the row order of `locs`) on a blue-white-red
/// scale clipped to [-limit, limit]. Complete 2-D grids are drawn as cells, any
/// other layout as dots.
std::string heatmap_svg(const Locations& locs, const Vector& values, double limit, const std::string& title = {});

}  // namespace shrinktm
