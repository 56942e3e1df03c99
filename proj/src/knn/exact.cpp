#include <omp.h>

#include <cmath>

#include "block_scan.hpp"
#include "topk.hpp"
#include "xld/error.hpp"
#include "xld/knn.hpp"
#include "xld/metrics.hpp"

namespace xld {
namespace {

// Below this many points a parallel region costs more than the scan.
constexpr std::size_t kParallelScanMin = 8192;

void scan_range(const PointSet& points, const float* q, const Filter& filter, std::size_t begin,
                std::size_t end, detail::TopK& top) {
  const std::size_t dim = points.dim();
  const detail::DistancePruner pruner(dim);
  double bound = top.bound();
  for (std::size_t i = begin; i < end; ++i) {
    if (!filter(points.meta(i))) continue;
    const float* row = points.row_ptr(i);
    if (top.full() && pruner.farther(detail::squared_euclidean_f32(q, row, dim), bound * bound)) continue;
    top.push({std::sqrt(squared_euclidean(q, row, dim)), i});
    bound = top.bound();
  }
}

void check_dimension(std::size_t got, std::size_t dim) {
  if (got != dim) {
    throw Error(Errc::dimension, "query dimension " + std::to_string(got) +
                                     " does not match index dimension " + std::to_string(dim));
  }
}

}  // namespace

ExactIndex::ExactIndex(PointSet points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(Errc::empty_index, "cannot build an index over zero points");
  norms_ = detail::row_norms(points_);
}

ExactIndex build_exact(PointSet points) { return ExactIndex(std::move(points)); }

NeighborList ExactIndex::query(std::span<const float> q, std::size_t k, const Filter& filter) const {
  return query_exact(*this, q, k, filter);
}

std::vector<NeighborList> ExactIndex::query_batch(std::span<const std::vector<float>> queries, std::size_t k,
                                                  const Filter& filter) const {
  return query_exact_batch(*this, queries, k, filter);
}

NeighborList query_exact(const ExactIndex& index, std::span<const float> q, std::size_t k,
                         const Filter& filter) {
  const PointSet& points = index.points();
  check_dimension(q.size(), points.dim());
  if (k == 0) return {};
  const std::size_t n = points.size();

  if (n < kParallelScanMin || omp_in_parallel()) {
    detail::TopK top(k, points);
    scan_range(points, q.data(), filter, 0, n, top);
    return detail::to_neighbors(top.take_sorted(), points);
  }

  // Each thread keeps the top-k of a contiguous chunk; the union of the
  // chunk winners contains the global top-k, so the merge is exact.
  std::vector<std::vector<detail::Candidate>> partial(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t begin = n * t / nt;
    const std::size_t end = n * (t + 1) / nt;
    detail::TopK top(k, points);
    scan_range(points, q.data(), filter, begin, end, top);
    partial[t] = top.take_sorted();
  }
  detail::TopK merged(k, points);
  for (const auto& part : partial) {
    for (const auto& c : part) merged.push(c);
  }
  return detail::to_neighbors(merged.take_sorted(), points);
}

std::vector<NeighborList> query_exact_batch(const ExactIndex& index, std::span<const std::vector<float>> queries,
                                            std::size_t k, const Filter& filter) {
  const PointSet& points = index.points();
  for (const auto& q : queries) check_dimension(q.size(), points.dim());
  std::vector<NeighborList> results(queries.size());
  if (k == 0 || queries.empty()) return results;

  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  const auto& norms = index.norms();
  std::vector<std::size_t> passing;
  for (std::size_t i = 0; i < n; ++i) {
    if (filter(points.meta(i))) passing.push_back(i);
  }
  const detail::Pruner pruner(dim);
  const auto blocks = static_cast<std::int64_t>((queries.size() + detail::kQueryBlock - 1) / detail::kQueryBlock);

  // Queries are independent, so the block schedule cannot change a result.
#pragma omp parallel for schedule(dynamic, 1) if (!omp_in_parallel())
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * detail::kQueryBlock;
    const std::size_t count = std::min(detail::kQueryBlock, queries.size() - first);
    detail::QueryBlock block(dim);
    std::vector<detail::TopK> tops;
    tops.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
      block.assign(s, queries[first + s].data());
      tops.emplace_back(k, points);
    }
    float dots[detail::kQueryBlock];
    for (const std::size_t i : passing) {
      const float* row = points.row_ptr(i);
      block.dots(row, dots);
      for (std::size_t s = 0; s < count; ++s) {
        auto& top = tops[s];
        if (top.full()) {
          const double bound = top.bound();
          if (pruner.farther(dots[s], block.norm(s), norms[i], bound * bound)) continue;
        }
        top.push({std::sqrt(squared_euclidean(block.row(s), row, dim)), i});
      }
    }
    for (std::size_t s = 0; s < count; ++s) results[first + s] = detail::to_neighbors(tops[s].take_sorted(), points);
  }
  return results;
}

}  // namespace xld
