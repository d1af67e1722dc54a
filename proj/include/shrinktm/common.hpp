// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace shrinktm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Malformed or inconsistent input (bad files, shape mismatches, duplicate points).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation produced a non-finite value or failed to factorize.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sets the worker cap used by the parallel loops. Values < 1 leave the runtime default.
void set_thread_count(int threads);
int thread_count();

}  // namespace shrinktm
