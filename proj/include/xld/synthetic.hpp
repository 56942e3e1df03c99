#pragma once

// Synthetic embedding generators for tests, benchmarks and calibration.
//
// Points are drawn from a low-dimensional Gaussian "topic manifold" placed
// in the ambient space and pushed onto the unit sphere:
//
//   x = normalize( offset * mu + sum_j scale_j * z_j * b_j + noise * g / sqrt(dim) )
//
// with mu a fixed random unit direction (the component every document
// shares), b_j a random orthonormal basis of `latent_dim` directions
// orthogonal to mu, scale_j = decay^j, z ~ N(0, I) and g ~ N(0, I_dim).
// Sentence-embedding clouds look like this: a common offset, a handful of
// dominant axes, and a thin isotropic residual.
//
// A paired corpus draws each left vector from the manifold and rotates it by
// an angle theta toward a fresh manifold draw m:
//
//   right = cos(theta) * left + sin(theta) * unit(m - (m . left) left)
//
// so the pair distance is exactly 2 sin(theta / 2). theta is the angle for
// `pair_distance` scaled by exp(spread * N(0, 1)). The native-English pool
// is drawn from the same manifold. With paired_manifold() and the defaults,
// the pair distance averages about 0.6 and the mean 10-NN distance to the
// pool is about 0.75 from either side.

#include <cstdint>
#include <vector>

#include "xld/corpus.hpp"
#include "xld/knn.hpp"
#include "xld/random.hpp"

namespace xld::synthetic {

struct ManifoldSpec {
  std::size_t dim = kEmbeddingDim;
  std::size_t latent_dim = 8;
  double decay = 0.8;
  double offset = 1.0;
  double noise = 0.1;
};

class Manifold {
 public:
  Manifold(const ManifoldSpec& spec, std::uint64_t seed);

  std::size_t dim() const noexcept { return spec_.dim; }
  /// One unit vector.
  std::vector<float> sample(Rng& rng) const;

 private:
  ManifoldSpec spec_;
  std::vector<double> mean_;
  std::vector<std::vector<double>> basis_;
};

/// `n` unit vectors from `spec`, keyed "P000000".. as NIH native-English
/// points.
PointSet manifold_points(std::size_t n, const ManifoldSpec& spec, std::uint64_t seed);

/// Query vectors from the same manifold as manifold_points(.., seed) but an
/// independent stream.
std::vector<std::vector<float>> manifold_queries(std::size_t n, const ManifoldSpec& spec,
                                                 std::uint64_t seed);

/// Sphere-uniform unit vectors (no structure at all).
std::vector<float> random_unit_vector(std::size_t dim, Rng& rng);

/// Manifold calibrated for paired corpora (see the header comment).
inline ManifoldSpec paired_manifold() {
  ManifoldSpec spec;
  spec.latent_dim = 16;
  spec.decay = 0.9;
  spec.noise = 1.0;
  return spec;
}

struct PairedCorpusSpec {
  std::size_t pairs = 1000;
  std::size_t pool = 5000;
  CoordinateType left = CoordinateType::native_ja;
  CoordinateType right = CoordinateType::mt_en;
  double pair_distance = 0.6;
  double spread = 0.15;
  ManifoldSpec manifold = paired_manifold();
  std::uint64_t seed = 1;
};

/// KAKENHI ids "K000000".. carry complete left/right records and vectors;
/// pool ids "E000000".. are native English, assigned NIH, NSF, UKRI in turn.
Corpus paired_corpus(const PairedCorpusSpec& spec);

}  // namespace xld::synthetic
