#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace xld {

/// Unit-length copy of `v`. Throws Errc::degenerate_vector when the norm is
/// at most 1e-12.
std::vector<float> normalize(std::span<const float> v);

/// L2 distance. Components are widened to double before accumulation, in a
/// fixed summation order, so results do not depend on the SIMD width.
/// Throws Errc::dimension on length mismatch.
double euclidean(std::span<const float> a, std::span<const float> b);

/// Same kernel without the length check; `dim` floats are read from each.
double squared_euclidean(const float* a, const float* b, std::size_t dim) noexcept;

double dot(std::span<const float> a, std::span<const float> b);
double norm(std::span<const float> v);

/// <a,b> / (|a| |b|), clamped to [-1, 1].
double cosine(std::span<const float> a, std::span<const float> b);

struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;   // sample standard deviation (n - 1)
  double var = 0.0;  // sd * sd
  std::size_t n = 0;
};

/// Throws Errc::insufficient_data for fewer than two values.
SummaryStats summary_stats(std::span<const double> values);

/// Fixed-point text with round-half-to-even on exact binary ties.
std::string format_fixed(double value, int places);

}  // namespace xld
