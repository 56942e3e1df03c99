#include <algorithm>
#include <bit>
#include <set>

#include "../parallel.hpp"
#include "topk.hpp"
#include "xld/error.hpp"
#include "xld/knn.hpp"
#include "xld/metrics.hpp"
#include "xld/vector_file.hpp"

namespace xld {

void PointSet::add(PointMeta meta, std::span<const float> v) {
  if (v.size() != dim_) {
    throw Error(Errc::dimension, "point " + to_string(meta.key) + " has dimension " +
                                     std::to_string(v.size()) + ", index dimension is " +
                                     std::to_string(dim_));
  }
  data_.insert(data_.end(), v.begin(), v.end());
  meta_.push_back(std::move(meta));
}

PointSet points_from_corpus(const Corpus& corpus) {
  PointSet points(kEmbeddingDim);
  for (const auto& [key, entry] : corpus.entries()) {
    if (entry.vector.empty()) continue;
    try {
      points.add({key, entry.record.agency}, normalize(entry.vector));
    } catch (const Error& e) {
      throw Error(e.code(), to_string(key) + ": " + e.what());
    }
  }
  return points;
}

std::vector<NeighborList> NeighborSource::query_batch(std::span<const std::vector<float>> queries, std::size_t k,
                                                      const Filter& filter) const {
  std::vector<NeighborList> results(queries.size());
  detail::parallel_for_each(queries.size(), [&](std::size_t i) { results[i] = query(queries[i], k, filter); });
  return results;
}

Filter accept_all() {
  return [](const PointMeta&) { return true; };
}

Filter native_english_from(std::vector<Agency> pool) {
  std::sort(pool.begin(), pool.end());
  return [pool = std::move(pool)](const PointMeta& m) {
    return m.key.type == CoordinateType::native_en &&
           std::binary_search(pool.begin(), pool.end(), m.agency);
  };
}

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.key < b.key;
}

double recall_at_k(const NeighborList& approx, const NeighborList& exact, std::size_t k) {
  if (k == 0) throw Error(Errc::invalid_argument, "recall@0 is undefined");
  if (exact.size() < k) {
    throw Error(Errc::insufficient_ground_truth, "exact list has " + std::to_string(exact.size()) +
                                                     " entries, need " + std::to_string(k));
  }
  std::set<RecordKey> truth;
  for (std::size_t i = 0; i < k; ++i) truth.insert(exact[i].key);
  std::set<RecordKey> seen;
  std::size_t hits = 0;
  for (const auto& n : approx) {
    if (truth.count(n.key) && seen.insert(n.key).second) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::uint64_t fingerprint(const PointSet& points) {
  std::uint64_t h = fnv1a(nullptr, 0);
  const std::uint64_t dim = points.dim();
  h = fnv1a(&dim, sizeof dim, h);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string k = points.meta(i).key.encoded();
    h = fnv1a(k.data(), k.size(), h);
    for (float f : points.row(i)) {
      const std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      h = fnv1a(&bits, sizeof bits, h);
    }
  }
  return h;
}

namespace detail {

NeighborList to_neighbors(const std::vector<Candidate>& sorted, const PointSet& points) {
  NeighborList out;
  out.reserve(sorted.size());
  for (const auto& c : sorted) out.push_back({c.index, points.meta(c.index).key, c.distance});
  return out;
}

}  // namespace detail
}  // namespace xld
