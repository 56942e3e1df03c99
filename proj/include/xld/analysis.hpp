#pragma once

// Drift measurements over a paired corpus: within-pair distances, distances
// to the nearest native-English projects, neighbor-set overlap, and
// distance histograms.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xld/corpus.hpp"
#include "xld/knn.hpp"
#include "xld/metrics.hpp"

namespace xld {

struct CoordinatePair {
  CoordinateType left = CoordinateType::native_ja;
  CoordinateType right = CoordinateType::mt_en;
};

/// "native_ja,mt_en" form.
CoordinatePair parse_pair(std::string_view text);
std::string to_string(CoordinatePair pair);

struct SampleSpec {
  std::uint64_t seed = 42;
  std::size_t n = 1000;
  CoordinatePair pair{};
  Agency agency = Agency::kakenhi();
};

using AgencyPool = std::vector<Agency>;

/// NIH, NSF and UKRI.
AgencyPool default_pool();
/// Comma-separated agency names; sorted and de-duplicated.
AgencyPool parse_pool(std::string_view text);
std::string to_string(const AgencyPool& pool);

inline constexpr std::size_t kDefaultK = 10;

/// Uniform sample without replacement of the eligible ids (complete pairs
/// belonging to spec.agency). The ascending eligible list is partially
/// Fisher-Yates shuffled with mt19937_64(spec.seed) and uniform_below; the
/// first n entries are returned in draw order. Throws
/// Errc::insufficient_population.
std::vector<std::string> sample_ids(const Corpus& corpus, const SampleSpec& spec);

/// Distance between the unit-normalized left and right vectors of `id`.
/// Throws Errc::missing_representation.
double pair_distance(const Corpus& corpus, const std::string& id, CoordinatePair pair);

/// Mean distance from the `side` vector of `id` to its k nearest
/// native-English points of the pool agencies in `source`. Throws
/// Errc::missing_representation, or Errc::insufficient_pool when the source
/// holds fewer than k such points.
double baseline_distance(const Corpus& corpus, const std::string& id, CoordinateType side,
                         const AgencyPool& pool, std::size_t k, const NeighborSource& source);

/// |keys(topk(left)) ∩ keys(topk(right))|, both retrievals restricted to the
/// pool's native-English points.
std::size_t neighborhood_overlap(const Corpus& corpus, const std::string& id, CoordinatePair pair,
                                 const AgencyPool& pool, std::size_t k, const NeighborSource& source);

struct DistanceRow {
  std::string label;
  SummaryStats stats;
};

struct PerIdDistances {
  std::string id;
  double pair = 0.0;
  double left_pool = 0.0;
  double right_pool = 0.0;
};

struct DistanceReport {
  SampleSpec spec;
  AgencyPool pool;
  std::size_t k = kDefaultK;
  /// within-pair, left-to-pool, right-to-pool.
  std::array<DistanceRow, 3> rows;
  /// Ascending by id.
  std::vector<PerIdDistances> per_id;
};

DistanceReport distance_table(const Corpus& corpus, const SampleSpec& spec, const AgencyPool& pool,
                              std::size_t k, const NeighborSource& source);

struct OverlapReport {
  SampleSpec spec;
  AgencyPool pool;
  std::size_t k = kDefaultK;
  /// (id, overlap), ascending by id.
  std::vector<std::pair<std::string, std::size_t>> counts;
  double average = 0.0;
};

OverlapReport overlap_table(const Corpus& corpus, const SampleSpec& spec, const AgencyPool& pool,
                            std::size_t k, const NeighborSource& source);

struct Histogram {
  std::string label;
  std::vector<double> edges;  // bins + 1 values, uniform over [0, 2]
  std::vector<std::size_t> counts;
};

inline constexpr double kMaxUnitDistance = 2.0;

/// Bins are right-open except the last, which is closed at 2. Values in
/// (2, 2 + 1e-9] land in the last bin; anything else outside [0, 2] throws
/// Errc::range.
Histogram distance_histogram(std::span<const double> values, std::size_t bins, std::string label = {});

}  // namespace xld
