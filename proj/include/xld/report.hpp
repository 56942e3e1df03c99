#pragma once

// Text serializations of analysis reports. All outputs are pure functions
// of the report, so identical reports give byte-identical files.

#include <string>

#include "xld/analysis.hpp"

namespace xld {

/// One JSON object per line: a "meta" line, then one "row" per distance class.
std::string to_jsonl(const DistanceReport& report);
/// Meta line, per-id "overlap" lines, then a "summary" line.
std::string to_jsonl(const OverlapReport& report);

/// Aligned plain-text tables; statistics rounded to 2 places (distances)
/// and 1 place (average overlap), half-to-even.
std::string to_table(const DistanceReport& report);
std::string to_table(const OverlapReport& report);

/// "bin_left\tcount" rows after a "# label" comment line.
std::string to_tsv(const Histogram& histogram);

/// id, pair, left_pool, right_pool per sampled project.
std::string per_id_tsv(const DistanceReport& report);

}  // namespace xld
