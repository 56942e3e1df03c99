#pragma once

// Exact brute-force neighbor search (the oracle) and a k-NN graph index
// searched greedily from random entry points.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "xld/corpus.hpp"

namespace xld {

namespace detail {
/// Squared norm of a row accumulated in double, and its square root.
struct RowNorm {
  double sq = 0.0;
  double len = 0.0;
};
}  // namespace detail

struct PointMeta {
  RecordKey key;
  Agency agency;
};

/// Row-major float matrix with one PointMeta per row.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  /// Throws Errc::dimension if `v` does not match dim().
  void add(PointMeta meta, std::span<const float> v);

  std::size_t size() const noexcept { return meta_.size(); }
  bool empty() const noexcept { return meta_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  const float* row_ptr(std::size_t i) const noexcept { return data_.data() + i * dim_; }
  const PointMeta& meta(std::size_t i) const { return meta_[i]; }

 private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::vector<PointMeta> meta_;
};

/// Every vector of the corpus, unit-normalized, in ascending key order.
PointSet points_from_corpus(const Corpus& corpus);

using Filter = std::function<bool(const PointMeta&)>;

/// Passes every point.
Filter accept_all();
/// NativeEn points whose agency is in `pool`.
Filter native_english_from(std::vector<Agency> pool);

struct Neighbor {
  std::size_t index = 0;
  RecordKey key;
  double distance = 0.0;
};

/// Ascending by distance, ties ascending by key.
using NeighborList = std::vector<Neighbor>;

bool neighbor_less(const Neighbor& a, const Neighbor& b);

/// Common query surface for the exact and graph indices.
class NeighborSource {
 public:
  virtual ~NeighborSource() = default;
  virtual const PointSet& points() const = 0;
  virtual NeighborList query(std::span<const float> q, std::size_t k, const Filter& filter) const = 0;
  /// One result per query, in order. The default runs query() across
  /// threads; the first failing query's exception is rethrown.
  virtual std::vector<NeighborList> query_batch(std::span<const std::vector<float>> queries, std::size_t k,
                                                const Filter& filter) const;
};

class ExactIndex final : public NeighborSource {
 public:
  /// Throws Errc::empty_index for an empty point set.
  explicit ExactIndex(PointSet points);

  const PointSet& points() const override { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  NeighborList query(std::span<const float> q, std::size_t k, const Filter& filter) const override;
  std::vector<NeighborList> query_batch(std::span<const std::vector<float>> queries, std::size_t k,
                                        const Filter& filter) const override;
  const std::vector<detail::RowNorm>& norms() const noexcept { return norms_; }

 private:
  PointSet points_;
  std::vector<detail::RowNorm> norms_;
};

ExactIndex build_exact(PointSet points);

/// Full scan; the scan is split across OpenMP threads when not already
/// inside a parallel region. Returns fewer than k only if fewer points pass.
NeighborList query_exact(const ExactIndex& index, std::span<const float> q, std::size_t k,
                         const Filter& filter);

/// query_exact for many queries at once, scanning the points once per block
/// of sixteen queries. Results are identical to per-query calls.
std::vector<NeighborList> query_exact_batch(const ExactIndex& index, std::span<const std::vector<float>> queries,
                                            std::size_t k, const Filter& filter);

struct SearchParams {
  std::size_t pool_size = 64;
  std::size_t entry_count = 4;
  std::size_t max_evaluations = 4096;
};

inline constexpr std::size_t kDefaultDegree = 16;
inline constexpr std::uint64_t kDefaultBuildSeed = 0x5eed;

class GraphIndex {
 public:
  /// Adopts a prebuilt adjacency (count x degree, row-major). Throws
  /// Errc::format if any list has a self-loop, an out-of-range index, or is
  /// not sorted by distance to its owner.
  GraphIndex(PointSet points, std::size_t degree, std::uint64_t build_seed,
             std::vector<std::uint32_t> adjacency);

  const PointSet& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t degree() const noexcept { return degree_; }
  std::uint64_t build_seed() const noexcept { return build_seed_; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {adjacency_.data() + i * degree_, degree_};
  }
  const std::vector<std::uint32_t>& adjacency() const noexcept { return adjacency_; }

 private:
  PointSet points_;
  std::size_t degree_;
  std::uint64_t build_seed_;
  std::vector<std::uint32_t> adjacency_;
};

/// Exact degree-NN graph (sorted by distance, ties by key), rows computed
/// in parallel. Throws Errc::invalid_argument for degree < 2 and
/// Errc::underfull_graph when size() <= degree.
GraphIndex build_graph(PointSet points, std::size_t degree = kDefaultDegree,
                       std::uint64_t build_seed = kDefaultBuildSeed);

/// Best-first search from `entry_count` entry points drawn from an RNG
/// seeded by the build seed and the query bits. Points failing the filter
/// are expanded but never returned. Stops when every pooled candidate has
/// been expanded or `max_evaluations` distances (beyond the entry points)
/// have been computed. Throws Errc::invalid_argument unless
/// 1 <= k <= pool_size.
NeighborList query_graph(const GraphIndex& index, std::span<const float> q, std::size_t k,
                         const SearchParams& params, const Filter& filter);

/// Binds a graph to fixed search parameters.
class GraphSearcher final : public NeighborSource {
 public:
  GraphSearcher(const GraphIndex& index, SearchParams params) : index_(index), params_(params) {}
  const PointSet& points() const override { return index_.points(); }
  NeighborList query(std::span<const float> q, std::size_t k, const Filter& filter) const override {
    return query_graph(index_, q, k, params_, filter);
  }

 private:
  const GraphIndex& index_;
  SearchParams params_;
};

/// |keys(approx) ∩ keys(exact[0..k))| / k. Throws
/// Errc::insufficient_ground_truth if exact holds fewer than k entries.
double recall_at_k(const NeighborList& approx, const NeighborList& exact, std::size_t k);

// Index file, little-endian:
//   magic "XLGI" | u32 version=1 | u32 mode (0 graph, 1 exact) | u32 degree
//   | u64 count | u64 build_seed | u64 points fingerprint
//   | count x degree u32 neighbor indices (graph mode only)
// Vectors are not stored; rows refer to points_from_corpus order.
enum class IndexMode : std::uint32_t { graph = 0, exact = 1 };

struct IndexFile {
  IndexMode mode = IndexMode::graph;
  std::uint32_t degree = 0;
  std::uint64_t count = 0;
  std::uint64_t build_seed = 0;
  std::uint64_t points_fingerprint = 0;
  std::vector<std::uint32_t> adjacency;
};

std::uint64_t fingerprint(const PointSet& points);

IndexFile to_index_file(const GraphIndex& index);
IndexFile exact_index_file(const PointSet& points);
void write_index_file(const std::filesystem::path& path, const IndexFile& file);
IndexFile read_index_file(const std::filesystem::path& path);

/// Rebinds a graph-mode file to its points. Throws Errc::format when the
/// count or fingerprint does not match.
GraphIndex graph_from_file(PointSet points, const IndexFile& file);

namespace reference {

// Single-threaded versions kept as the baseline for tests and benchmarks.
NeighborList query_exact_serial(const PointSet& points, std::span<const float> q, std::size_t k,
                                const Filter& filter);
std::vector<std::uint32_t> knn_graph_serial(const PointSet& points, std::size_t degree);

}  // namespace reference

}  // namespace xld
