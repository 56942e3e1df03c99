#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

namespace xld::detail {

/// Runs `body(i)` for every i in [0, n) across threads. The first exception
/// (lowest index) is rethrown after the loop.
template <typename Body>
void parallel_for_each(std::size_t n, Body body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace xld::detail
