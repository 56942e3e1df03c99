#pragma once

// Batched pruning for exact scans. A block of queries is packed once and
// every point row streams past it, so each row is read from memory once per
// block instead of once per query. Float dot products only decide which
// points can be skipped; survivors are rescored with squared_euclidean, so
// results match an unpruned double scan exactly.

#include <cstddef>
#include <span>
#include <vector>

#include "xld/knn.hpp"

namespace xld::detail {

inline constexpr std::size_t kQueryBlock = 16;

/// Up to kQueryBlock rows packed row-major and zero padded.
class QueryBlock {
 public:
  QueryBlock(std::size_t dim) : dim_(dim), packed_(kQueryBlock * dim, 0.0f), norms_(kQueryBlock) {}

  void assign(std::size_t slot, const float* row);
  const float* row(std::size_t slot) const noexcept { return packed_.data() + slot * dim_; }
  const RowNorm& norm(std::size_t slot) const noexcept { return norms_[slot]; }

  /// out[s] = float dot product of slot s with `row`, for every slot.
  void dots(const float* row, float* out) const noexcept;

 private:
  std::size_t dim_;
  std::vector<float> packed_;
  std::vector<RowNorm> norms_;
};

RowNorm row_norm(const float* v, std::size_t dim) noexcept;
std::vector<RowNorm> row_norms(const PointSet& points);

/// Decides from a float dot product whether a point is provably farther
/// than the current k-th distance.
class Pruner {
 public:
  explicit Pruner(std::size_t dim);

  /// True when the double-kernel squared distance between q and p must
  /// exceed bound_sq.
  bool farther(float dot, const RowNorm& q, const RowNorm& p, double bound_sq) const noexcept {
    const double estimate = q.sq + p.sq - 2.0 * static_cast<double>(dot);
    const double error = dot_error_ * q.len * p.len + 1e-12 * (q.sq + p.sq) + slack_;
    return estimate - error > bound_sq * (1.0 + 1e-9) + slack_;
  }

 private:
  double dot_error_;
  double slack_;
};

/// Single-query pruning: a float squared distance `estimate` proves the
/// double-kernel squared distance exceeds bound_sq.
float squared_euclidean_f32(const float* a, const float* b, std::size_t dim) noexcept;

class DistancePruner {
 public:
  explicit DistancePruner(std::size_t dim);
  bool farther(float estimate, double bound_sq) const noexcept {
    return static_cast<double>(estimate) > bound_sq * (1.0 + rel_error_) * (1.0 + 1e-9) + slack_;
  }

 private:
  double rel_error_;
  double slack_;
};

}  // namespace xld::detail
