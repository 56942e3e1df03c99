#include "xld/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "xld/error.hpp"

namespace xld {
namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr std::size_t kLanes = 8;

double reduce_lanes(double (&acc)[kLanes]) noexcept {
  for (std::size_t width = kLanes / 2; width > 0; width /= 2) {
    for (std::size_t l = 0; l < width; ++l) acc[l] += acc[l + width];
  }
  return acc[0];
}

void require_same_dim(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::dimension, "dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                     std::to_string(b.size()));
  }
}

// Rounding to float leaves the squared norm off by up to about 1e-8, which
// is enough to break d^2 = 2 - 2cos at 1e-9. Moving single components by one
// ulp (each step shifts the squared norm by about 2 x^2 2^-24) pulls it back.
// A vector already within tolerance is left untouched, so this is idempotent.
void refine_unit_norm(std::vector<float>& v) {
  constexpr double kTolerance = 1e-13;
  double err = -1.0;
  for (float x : v) err += static_cast<double>(x) * x;
  for (int pass = 0; pass < 16 && std::abs(err) > kTolerance; ++pass) {
    bool moved = false;
    for (auto& x : v) {
      if (x == 0.0f) continue;
      const float toward = err > 0 ? 0.0f : std::copysign(2.0f, x);
      const float y = std::nextafter(x, toward);
      const double next = err + (static_cast<double>(y) * y - static_cast<double>(x) * x);
      if (std::abs(next) < std::abs(err)) {
        x = y;
        err = next;
        moved = true;
        if (std::abs(err) <= kTolerance) break;
      }
    }
    if (!moved) break;
  }
}

}  // namespace

// Independent accumulators let the compiler vectorize without
// reassociating; lane l always sums elements l, l + kLanes, ... and the
// lanes are combined by a fixed pairwise tree.
double squared_euclidean(const float* a, const float* b, std::size_t dim) noexcept {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= dim; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double d = static_cast<double>(a[i + l]) - static_cast<double>(b[i + l]);
      acc[l] += d * d;
    }
  }
  for (std::size_t l = 0; i < dim; ++i, ++l) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc[l] += d * d;
  }
  return reduce_lanes(acc);
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  require_same_dim(a, b);
  return std::sqrt(squared_euclidean(a.data(), b.data(), a.size()));
}

double dot(std::span<const float> a, std::span<const float> b) {
  require_same_dim(a, b);
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= a.size(); i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      acc[l] += static_cast<double>(a[i + l]) * static_cast<double>(b[i + l]);
    }
  }
  for (std::size_t l = 0; i < a.size(); ++i, ++l) {
    acc[l] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return reduce_lanes(acc);
}

double norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

std::vector<float> normalize(std::span<const float> v) {
  const double n = norm(v);
  if (!(n > kDegenerateNorm)) throw Error(Errc::degenerate_vector, "cannot normalize a near-zero vector");
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / n);
  refine_unit_norm(out);
  return out;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > kDegenerateNorm) || !(nb > kDegenerateNorm)) {
    throw Error(Errc::degenerate_vector, "cosine of a near-zero vector");
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(Errc::insufficient_data, "summary statistics need at least 2 values, got " +
                                             std::to_string(values.size()));
  }
  SummaryStats s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  // Two-pass: the centered sum avoids cancellation for tightly clustered data.
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.var = ss / static_cast<double>(s.n - 1);
  s.sd = std::sqrt(s.var);
  s.var = s.sd * s.sd;
  return s;
}

std::string format_fixed(double value, int places) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, places);
  if (ec != std::errc{}) return "nan";
  std::string s(buf, end);
  // "-0.00" reads badly in a table.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace xld
