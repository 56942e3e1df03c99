#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xld {

enum class Errc {
  parse,
  duplicate_key,
  dimension,
  orphan_vector,
  format,
  io,
  degenerate_vector,
  insufficient_data,
  empty_index,
  underfull_graph,
  invalid_argument,
  insufficient_ground_truth,
  insufficient_population,
  missing_representation,
  insufficient_pool,
  search_exhausted,
  range,
};

std::string_view to_string(Errc code) noexcept;

// Input-side failures (bad files, bad keys) as opposed to failures raised
// while computing on well-formed data. The CLI maps these to exit codes 2/3.
bool is_data_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace xld
