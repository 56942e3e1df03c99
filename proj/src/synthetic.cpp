#include "xld/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "xld/error.hpp"
#include "xld/metrics.hpp"

namespace xld::synthetic {
namespace {

std::vector<double> gaussian(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale(std::vector<double>& v, double f) {
  for (auto& x : v) x *= f;
}

std::string numbered(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%06zu", prefix, i);
  return buf;
}

std::vector<float> to_unit_float(const std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / n);
  return out;
}

}  // namespace

Manifold::Manifold(const ManifoldSpec& spec, std::uint64_t seed) : spec_(spec) {
  if (spec.dim < spec.latent_dim + 1) throw Error(Errc::invalid_argument, "latent_dim must be below dim");
  Rng rng(mix_seed(seed));
  mean_ = gaussian(spec.dim, rng);
  scale(mean_, 1.0 / std::sqrt(dot(mean_, mean_)));
  // Gram-Schmidt against the mean and the previous axes.
  for (std::size_t j = 0; j < spec.latent_dim; ++j) {
    auto b = gaussian(spec.dim, rng);
    for (int pass = 0; pass < 2; ++pass) {
      const double m = dot(b, mean_);
      for (std::size_t i = 0; i < b.size(); ++i) b[i] -= m * mean_[i];
      for (const auto& prev : basis_) {
        const double p = dot(b, prev);
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= p * prev[i];
      }
    }
    scale(b, 1.0 / std::sqrt(dot(b, b)));
    basis_.push_back(std::move(b));
  }
}

std::vector<float> Manifold::sample(Rng& rng) const {
  std::normal_distribution<double> normal;
  std::vector<double> x(spec_.dim);
  for (std::size_t i = 0; i < spec_.dim; ++i) x[i] = spec_.offset * mean_[i];
  double s = 1.0;
  for (const auto& b : basis_) {
    const double z = s * normal(rng);
    for (std::size_t i = 0; i < spec_.dim; ++i) x[i] += z * b[i];
    s *= spec_.decay;
  }
  const double amp = spec_.noise / std::sqrt(static_cast<double>(spec_.dim));
  for (auto& xi : x) xi += amp * normal(rng);
  return to_unit_float(x);
}

std::vector<float> random_unit_vector(std::size_t dim, Rng& rng) {
  return to_unit_float(gaussian(dim, rng));
}

PointSet manifold_points(std::size_t n, const ManifoldSpec& spec, std::uint64_t seed) {
  Manifold manifold(spec, seed);
  Rng rng(mix_seed(seed ^ 0x70696e74ULL));
  PointSet points(spec.dim);
  for (std::size_t i = 0; i < n; ++i) {
    points.add({{numbered('P', i), CoordinateType::native_en}, Agency::nih()}, manifold.sample(rng));
  }
  return points;
}

std::vector<std::vector<float>> manifold_queries(std::size_t n, const ManifoldSpec& spec,
                                                 std::uint64_t seed) {
  Manifold manifold(spec, seed);
  Rng rng(mix_seed(seed ^ 0x71756572ULL));
  std::vector<std::vector<float>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(manifold.sample(rng));
  return out;
}

Corpus paired_corpus(const PairedCorpusSpec& spec) {
  if (spec.manifold.dim != kEmbeddingDim) {
    throw Error(Errc::dimension, "paired corpora use the embedding dimension");
  }
  if (!(spec.pair_distance > 0.0 && spec.pair_distance < 2.0) || !(spec.spread >= 0.0)) {
    throw Error(Errc::invalid_argument, "pair_distance must lie in (0, 2) and spread must be >= 0");
  }
  Manifold manifold(spec.manifold, spec.seed);
  Rng rng(mix_seed(spec.seed ^ 0x70616972ULL));
  std::normal_distribution<double> normal;
  const double median_angle = 2.0 * std::asin(spec.pair_distance / 2.0);
  const double pi = std::acos(-1.0);

  Corpus corpus;
  for (std::size_t i = 0; i < spec.pairs; ++i) {
    const std::string id = numbered('K', i);
    auto left = manifold.sample(rng);
    const std::vector<double> l(left.begin(), left.end());
    // Rotate toward a fresh manifold draw so the right side stays on the
    // manifold; an isotropic direction would push it away from the pool.
    std::vector<double> u;
    for (double len = 0.0; len < 1e-6;) {
      const auto m = manifold.sample(rng);
      u.assign(m.begin(), m.end());
      const double c = dot(u, l);
      for (std::size_t d = 0; d < kEmbeddingDim; ++d) u[d] -= c * l[d];
      len = std::sqrt(dot(u, u));
      if (len >= 1e-6) scale(u, 1.0 / len);
    }
    const double angle = std::min(median_angle * std::exp(spec.spread * normal(rng)), pi);
    std::vector<double> right(kEmbeddingDim);
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) right[d] = std::cos(angle) * l[d] + std::sin(angle) * u[d];
    for (auto type : {spec.left, spec.right}) {
      corpus.add_record({id, Agency::kakenhi(), type, "synthetic title", "synthetic abstract", std::nullopt});
    }
    corpus.attach_vector({id, spec.left}, std::move(left));
    corpus.attach_vector({id, spec.right}, to_unit_float(right));
  }
  const Agency agencies[] = {Agency::nih(), Agency::nsf(), Agency::ukri()};
  for (std::size_t i = 0; i < spec.pool; ++i) {
    const std::string id = numbered('E', i);
    corpus.add_record({id, agencies[i % 3], CoordinateType::native_en, "synthetic title",
                       "synthetic abstract", std::nullopt});
    corpus.attach_vector({id, CoordinateType::native_en}, manifold.sample(rng));
  }
  return corpus;
}

}  // namespace xld::synthetic
