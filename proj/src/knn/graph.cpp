#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "block_scan.hpp"
#include "topk.hpp"
#include "xld/error.hpp"
#include "xld/knn.hpp"
#include "xld/metrics.hpp"
#include "xld/random.hpp"
#include "xld/vector_file.hpp"

namespace xld {
namespace {

double distance(const PointSet& points, std::size_t i, std::size_t j) {
  return std::sqrt(squared_euclidean(points.row_ptr(i), points.row_ptr(j), points.dim()));
}

void check_degree(const PointSet& points, std::size_t degree) {
  if (degree < 2) throw Error(Errc::invalid_argument, "graph degree must be at least 2");
  if (points.size() <= degree) {
    throw Error(Errc::underfull_graph, "graph over " + std::to_string(points.size()) +
                                           " points cannot have degree " + std::to_string(degree));
  }
  if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::invalid_argument, "graph index is limited to 2^32-1 points");
  }
}

/// Pool of best candidates seen so far, sorted, with an expanded flag.
class SearchPool {
 public:
  SearchPool(std::size_t capacity, const PointSet& points) : capacity_(capacity), less_(points) {
    entries_.reserve(capacity + 1);
  }

  void offer(detail::Candidate c) {
    if (entries_.size() == capacity_ && !less_(c, entries_.back().cand)) return;
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), c,
                                [&](const detail::Candidate& v, const Entry& e) { return less_(v, e.cand); });
    entries_.insert(pos, Entry{c, false});
    if (entries_.size() > capacity_) entries_.pop_back();
  }

  /// Closest unexpanded candidate, marked expanded; npos when stable.
  std::size_t next() {
    for (auto& e : entries_) {
      if (!e.expanded) {
        e.expanded = true;
        return e.cand.index;
      }
    }
    return npos;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  struct Entry {
    detail::Candidate cand;
    bool expanded;
  };
  std::size_t capacity_;
  detail::CandidateOrder less_;
  std::vector<Entry> entries_;
};

}  // namespace

GraphIndex::GraphIndex(PointSet points, std::size_t degree, std::uint64_t build_seed,
                       std::vector<std::uint32_t> adjacency)
    : points_(std::move(points)), degree_(degree), build_seed_(build_seed), adjacency_(std::move(adjacency)) {
  const std::size_t n = points_.size();
  if (adjacency_.size() != n * degree_) {
    throw Error(Errc::format, "adjacency holds " + std::to_string(adjacency_.size()) +
                                  " entries, expected " + std::to_string(n * degree_));
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = neighbors(i);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (nb[j] >= n || nb[j] == i) {
        throw Error(Errc::format, "adjacency of point " + std::to_string(i) + " has an invalid entry");
      }
      if (j > 0 && distance(points_, i, nb[j]) < distance(points_, i, nb[j - 1])) {
        throw Error(Errc::format, "adjacency of point " + std::to_string(i) + " is not distance-sorted");
      }
    }
  }
}

GraphIndex build_graph(PointSet points, std::size_t degree, std::uint64_t build_seed) {
  check_degree(points, degree);
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  const auto norms = detail::row_norms(points);
  const detail::Pruner pruner(dim);
  std::vector<std::uint32_t> adjacency(n * degree);
  constexpr std::size_t kRowBlock = detail::kQueryBlock;
  const auto blocks = static_cast<std::int64_t>((n + kRowBlock - 1) / kRowBlock);

  // Each row's list depends only on the data, so the schedule cannot change
  // the result.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t row_begin = static_cast<std::size_t>(b) * kRowBlock;
    const std::size_t count = std::min(n - row_begin, kRowBlock);
    detail::QueryBlock block(dim);
    std::vector<detail::TopK> tops;
    tops.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
      block.assign(s, points.row_ptr(row_begin + s));
      tops.emplace_back(degree, points);
    }
    float dots[detail::kQueryBlock];
    for (std::size_t j = 0; j < n; ++j) {
      const float* col = points.row_ptr(j);
      block.dots(col, dots);
      for (std::size_t s = 0; s < count; ++s) {
        const std::size_t r = row_begin + s;
        if (r == j) continue;
        auto& top = tops[s];
        if (top.full()) {
          const double bound = top.bound();
          if (pruner.farther(dots[s], norms[r], norms[j], bound * bound)) continue;
        }
        top.push({std::sqrt(squared_euclidean(block.row(s), col, dim)), j});
      }
    }
    for (std::size_t s = 0; s < count; ++s) {
      const auto sorted = tops[s].take_sorted();
      for (std::size_t t = 0; t < degree; ++t) {
        adjacency[(row_begin + s) * degree + t] = static_cast<std::uint32_t>(sorted[t].index);
      }
    }
  }
  return GraphIndex(std::move(points), degree, build_seed, std::move(adjacency));
}

NeighborList query_graph(const GraphIndex& index, std::span<const float> q, std::size_t k,
                         const SearchParams& params, const Filter& filter) {
  if (k == 0 || k > params.pool_size) {
    throw Error(Errc::invalid_argument, "search requires 1 <= k <= pool_size (k=" + std::to_string(k) +
                                            ", pool_size=" + std::to_string(params.pool_size) + ")");
  }
  const PointSet& points = index.points();
  if (q.size() != points.dim()) {
    throw Error(Errc::dimension, "query dimension " + std::to_string(q.size()) +
                                     " does not match index dimension " + std::to_string(points.dim()));
  }
  const std::size_t n = points.size();
  if (n == 0) return {};

  Rng rng(mix_seed(index.build_seed() ^ fnv1a(q.data(), q.size_bytes())));
  std::vector<char> visited(n, 0);
  SearchPool pool(params.pool_size, points);
  detail::TopK results(k, points);

  auto evaluate = [&](std::size_t i) {
    visited[i] = 1;
    const double d = std::sqrt(squared_euclidean(q.data(), points.row_ptr(i), points.dim()));
    const detail::Candidate c{d, i};
    pool.offer(c);
    if (filter(points.meta(i))) results.push(c);
  };

  const std::size_t entries = std::min(std::max<std::size_t>(params.entry_count, 1), n);
  for (std::size_t drawn = 0; drawn < entries;) {
    const auto i = static_cast<std::size_t>(uniform_below(rng, n));
    if (visited[i]) continue;
    evaluate(i);
    ++drawn;
  }

  std::size_t evaluations = 0;
  for (std::size_t cur = pool.next(); cur != SearchPool::npos; cur = pool.next()) {
    for (std::uint32_t nb : index.neighbors(cur)) {
      if (visited[nb]) continue;
      if (evaluations == params.max_evaluations) return detail::to_neighbors(results.take_sorted(), points);
      evaluate(nb);
      ++evaluations;
    }
  }
  return detail::to_neighbors(results.take_sorted(), points);
}

}  // namespace xld
