// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ShrinkTM Authors

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace shrinktm {

/// Runs body(i) for i in [0, count) across the OpenMP team. The first exception
/// thrown by any iteration is rethrown on the calling thread after the loop.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr error;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(count); ++s) {
    try {
      body(static_cast<std::size_t>(s));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace shrinktm
