#include "xld/error.hpp"

namespace xld {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::parse: return "parse error";
    case Errc::duplicate_key: return "duplicate key";
    case Errc::dimension: return "dimension error";
    case Errc::orphan_vector: return "orphan vector";
    case Errc::format: return "format error";
    case Errc::io: return "i/o error";
    case Errc::degenerate_vector: return "degenerate vector";
    case Errc::insufficient_data: return "insufficient data";
    case Errc::empty_index: return "empty index";
    case Errc::underfull_graph: return "underfull graph";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::insufficient_ground_truth: return "insufficient ground truth";
    case Errc::insufficient_population: return "insufficient population";
    case Errc::missing_representation: return "missing representation";
    case Errc::insufficient_pool: return "insufficient pool";
    case Errc::search_exhausted: return "search exhausted";
    case Errc::range: return "range error";
  }
  return "unknown error";
}

bool is_data_error(Errc code) noexcept {
  switch (code) {
    case Errc::parse:
    case Errc::duplicate_key:
    case Errc::dimension:
    case Errc::orphan_vector:
    case Errc::format:
    case Errc::io:
    case Errc::missing_representation:
    case Errc::insufficient_population:
    case Errc::insufficient_pool:
      return true;
    default:
      return false;
  }
}

}  // namespace xld
