#include "block_scan.hpp"

#include <algorithm>
#include <cmath>

#include "xld/metrics.hpp"

namespace xld::detail {
namespace {

// Sixteen float lanes per query, sixteen queries per block: one AVX-512
// accumulator each, all resident in registers.
constexpr std::size_t kDotLanes = 16;

}  // namespace

void QueryBlock::assign(std::size_t slot, const float* row) {
  std::copy(row, row + dim_, packed_.begin() + static_cast<std::ptrdiff_t>(slot * dim_));
  norms_[slot] = row_norm(row, dim_);
}

void QueryBlock::dots(const float* row, float* out) const noexcept {
  const float* q = packed_.data();
  const std::size_t dim = dim_;
  float acc[kQueryBlock][kDotLanes] = {};
  std::size_t i = 0;
  for (; i + kDotLanes <= dim; i += kDotLanes) {
    for (std::size_t s = 0; s < kQueryBlock; ++s) {
      for (std::size_t l = 0; l < kDotLanes; ++l) acc[s][l] += q[s * dim + i + l] * row[i + l];
    }
  }
  for (std::size_t s = 0; s < kQueryBlock; ++s) {
    float sum = 0.0f;
    for (std::size_t l = 0; l < kDotLanes; ++l) sum += acc[s][l];
    out[s] = sum;
  }
  // Kept apart from acc so the main loop's accumulators stay in registers.
  for (std::size_t s = 0; s < kQueryBlock; ++s) {
    for (std::size_t t = i; t < dim; ++t) out[s] += q[s * dim + t] * row[t];
  }
}

float squared_euclidean_f32(const float* a, const float* b, std::size_t dim) noexcept {
  constexpr std::size_t kF32Lanes = 16;
  float acc[kF32Lanes] = {};
  std::size_t i = 0;
  for (; i + kF32Lanes <= dim; i += kF32Lanes) {
    for (std::size_t l = 0; l < kF32Lanes; ++l) {
      const float d = a[i + l] - b[i + l];
      acc[l] += d * d;
    }
  }
  for (std::size_t l = 0; i < dim; ++i, ++l) {
    const float d = a[i] - b[i];
    acc[l] += d * d;
  }
  for (std::size_t width = kF32Lanes / 2; width > 0; width /= 2) {
    for (std::size_t l = 0; l < width; ++l) acc[l] += acc[l + width];
  }
  return acc[0];
}

// Each term carries at most 3 roundings and passes through fewer than dim
// additions: gamma_{dim+3} for u = 2^-24, doubled for margin. Underflowed
// terms lose at most 2^-126 each.
DistancePruner::DistancePruner(std::size_t dim) {
  const double nu = static_cast<double>(dim + 3) * 0x1p-24;
  rel_error_ = 2.0 * nu / (1.0 - nu);
  slack_ = static_cast<double>(dim) * 0x1p-125;
}

RowNorm row_norm(const float* v, std::size_t dim) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) s += static_cast<double>(v[i]) * v[i];
  return {s, std::sqrt(s)};
}

std::vector<RowNorm> row_norms(const PointSet& points) {
  std::vector<RowNorm> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = row_norm(points.row_ptr(i), points.dim());
  return out;
}

// |fl(q.p) - q.p| <= gamma_{dim+2} * sum|q_i p_i| <= gamma_{dim+2} * |q||p|
// for any summation order, with u = 2^-24. The squared distance estimate
// q_sq + p_sq - 2 q.p then errs by at most twice that, plus double rounding
// in the norms and the subtraction (covered by the relative slack). The
// 1e-9 factor on the bound absorbs the double kernel's own rounding, so a
// pruned point is strictly farther under squared_euclidean as well.
Pruner::Pruner(std::size_t dim) {
  const double nu = static_cast<double>(dim + 2) * 0x1p-24;
  dot_error_ = 2.0 * nu / (1.0 - nu) * (1.0 + 1e-6);
  slack_ = static_cast<double>(dim) * 0x1p-125;
}

}  // namespace xld::detail
