#include <algorithm>
#include <cmath>

#include "../knn/topk.hpp"
#include "xld/error.hpp"
#include "xld/knn.hpp"
#include "xld/metrics.hpp"

namespace xld::reference {

NeighborList query_exact_serial(const PointSet& points, std::span<const float> q, std::size_t k,
                                const Filter& filter) {
  if (q.size() != points.dim()) throw Error(Errc::dimension, "query dimension mismatch");
  detail::TopK top(k, points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!filter(points.meta(i))) continue;
    top.push({euclidean(q, points.row(i)), i});
  }
  return detail::to_neighbors(top.take_sorted(), points);
}

std::vector<std::uint32_t> knn_graph_serial(const PointSet& points, std::size_t degree) {
  if (points.size() <= degree) throw Error(Errc::underfull_graph, "too few points for degree");
  std::vector<std::uint32_t> adjacency;
  adjacency.reserve(points.size() * degree);
  for (std::size_t i = 0; i < points.size(); ++i) {
    detail::TopK top(degree, points);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) top.push({euclidean(points.row(i), points.row(j)), j});
    }
    for (const auto& c : top.take_sorted()) adjacency.push_back(static_cast<std::uint32_t>(c.index));
  }
  return adjacency;
}

}  // namespace xld::reference
