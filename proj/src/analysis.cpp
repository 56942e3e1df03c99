#include "xld/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "xld/error.hpp"
#include "xld/random.hpp"

namespace xld {
namespace {

std::vector<float> unit_vector(const Corpus& corpus, const std::string& id, CoordinateType type) {
  auto v = corpus.vector({id, type});
  if (v.empty()) {
    throw Error(Errc::missing_representation,
                "no " + std::string(to_string(type)) + " vector for project " + id);
  }
  return normalize(v);
}

std::size_t pool_population(const NeighborSource& source, const Filter& filter) {
  const PointSet& points = source.points();
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.size(); ++i) count += filter(points.meta(i)) ? 1 : 0;
  return count;
}

/// k pool neighbors of `q`. Fewer than k results raise insufficient_pool when
/// the population is the cause, search_exhausted otherwise.
NeighborList pool_neighbors(std::span<const float> q, std::size_t k, const Filter& filter,
                            const NeighborSource& source) {
  if (k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
  NeighborList found = source.query(q, k, filter);
  if (found.size() < k) {
    const std::size_t population = pool_population(source, filter);
    if (population < k) {
      throw Error(Errc::insufficient_pool, "pool holds " + std::to_string(population) +
                                               " native-English points, need " + std::to_string(k));
    }
    throw Error(Errc::search_exhausted, "search returned " + std::to_string(found.size()) + " of " +
                                            std::to_string(k) +
                                            " neighbors; raise max_evaluations or pool_size");
  }
  return found;
}

/// pool_neighbors for many queries through one batch call. Errors are
/// reported for the first short result in query order.
std::vector<NeighborList> pool_neighbors(std::span<const std::vector<float>> queries, std::size_t k,
                                         const Filter& filter, const NeighborSource& source) {
  if (k == 0) throw Error(Errc::invalid_argument, "k must be at least 1");
  auto found = source.query_batch(queries, k, filter);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].size() < k) pool_neighbors(queries[i], k, filter, source);
  }
  return found;
}

/// Unit vectors of `side` for each id, in id order.
std::vector<std::vector<float>> unit_vectors(const Corpus& corpus, const std::vector<std::string>& ids,
                                             CoordinateType side) {
  std::vector<std::vector<float>> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(unit_vector(corpus, id, side));
  return out;
}

double mean_distance(const NeighborList& list) {
  double sum = 0.0;
  for (const auto& n : list) sum += n.distance;
  return sum / static_cast<double>(list.size());
}

std::size_t key_overlap(const NeighborList& a, const NeighborList& b) {
  std::set<RecordKey> keys;
  for (const auto& n : a) keys.insert(n.key);
  std::set<RecordKey> counted;
  std::size_t overlap = 0;
  for (const auto& n : b) {
    if (keys.count(n.key) && counted.insert(n.key).second) ++overlap;
  }
  return overlap;
}

std::string label_for(CoordinateType a, CoordinateType b, bool same_project) {
  std::string s = std::string(to_string(a)) + " vs " + std::string(to_string(b));
  if (same_project) s += " (same project)";
  return s;
}

}  // namespace

CoordinatePair parse_pair(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw Error(Errc::invalid_argument, "pair must be 'left,right', got '" + std::string(text) + "'");
  }
  CoordinatePair p{parse_coordinate_type(text.substr(0, comma)),
                   parse_coordinate_type(text.substr(comma + 1))};
  if (p.left == p.right) throw Error(Errc::invalid_argument, "pair sides must differ");
  return p;
}

std::string to_string(CoordinatePair pair) {
  return std::string(to_string(pair.left)) + "," + std::string(to_string(pair.right));
}

AgencyPool default_pool() { return {Agency::nih(), Agency::nsf(), Agency::ukri()}; }

AgencyPool parse_pool(std::string_view text) {
  AgencyPool pool;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    auto name = text.substr(start, comma - start);
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    if (!name.empty()) pool.push_back(Agency::parse(name));
    start = comma + 1;
  }
  if (pool.empty()) throw Error(Errc::invalid_argument, "agency pool is empty");
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return pool;
}

std::string to_string(const AgencyPool& pool) {
  std::string s;
  for (const auto& a : pool) {
    if (!s.empty()) s += ',';
    s += a.name();
  }
  return s;
}

std::vector<std::string> sample_ids(const Corpus& corpus, const SampleSpec& spec) {
  if (spec.n == 0) throw Error(Errc::invalid_argument, "sample size must be at least 1");
  std::vector<std::string> eligible;
  for (auto& id : filter_complete_pairs(corpus, spec.pair.left, spec.pair.right)) {
    if (corpus.find({id, spec.pair.left})->agency == spec.agency) eligible.push_back(std::move(id));
  }
  if (eligible.size() < spec.n) {
    throw Error(Errc::insufficient_population,
                std::to_string(eligible.size()) + " eligible " + spec.agency.name() + " projects for pair " +
                    to_string(spec.pair) + ", sample needs " + std::to_string(spec.n));
  }
  Rng rng(spec.seed);
  partial_shuffle(std::span<std::string>(eligible), spec.n, rng);
  eligible.resize(spec.n);
  return eligible;
}

double pair_distance(const Corpus& corpus, const std::string& id, CoordinatePair pair) {
  return euclidean(unit_vector(corpus, id, pair.left), unit_vector(corpus, id, pair.right));
}

double baseline_distance(const Corpus& corpus, const std::string& id, CoordinateType side,
                         const AgencyPool& pool, std::size_t k, const NeighborSource& source) {
  if (pool.empty()) throw Error(Errc::invalid_argument, "agency pool is empty");
  const auto q = unit_vector(corpus, id, side);
  return mean_distance(pool_neighbors(q, k, native_english_from(pool), source));
}

std::size_t neighborhood_overlap(const Corpus& corpus, const std::string& id, CoordinatePair pair,
                                 const AgencyPool& pool, std::size_t k, const NeighborSource& source) {
  if (pool.empty()) throw Error(Errc::invalid_argument, "agency pool is empty");
  const auto filter = native_english_from(pool);
  const auto left = pool_neighbors(unit_vector(corpus, id, pair.left), k, filter, source);
  const auto right = pool_neighbors(unit_vector(corpus, id, pair.right), k, filter, source);
  return key_overlap(left, right);
}

DistanceReport distance_table(const Corpus& corpus, const SampleSpec& spec, const AgencyPool& pool,
                              std::size_t k, const NeighborSource& source) {
  auto ids = sample_ids(corpus, spec);
  // Aggregation runs over id order, so the schedule cannot affect sums.
  std::sort(ids.begin(), ids.end());

  DistanceReport report;
  report.spec = spec;
  report.pool = pool;
  report.k = k;
  if (pool.empty()) throw Error(Errc::invalid_argument, "agency pool is empty");
  const auto filter = native_english_from(pool);
  const auto left = unit_vectors(corpus, ids, spec.pair.left);
  const auto right = unit_vectors(corpus, ids, spec.pair.right);
  const auto left_nb = pool_neighbors(left, k, filter, source);
  const auto right_nb = pool_neighbors(right, k, filter, source);

  report.per_id.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& row = report.per_id[i];
    row.id = ids[i];
    row.pair = euclidean(left[i], right[i]);
    row.left_pool = mean_distance(left_nb[i]);
    row.right_pool = mean_distance(right_nb[i]);
  }

  std::vector<double> pair_d, left_d, right_d;
  for (const auto& row : report.per_id) {
    pair_d.push_back(row.pair);
    left_d.push_back(row.left_pool);
    right_d.push_back(row.right_pool);
  }
  const auto native_en = CoordinateType::native_en;
  report.rows[0] = {label_for(spec.pair.left, spec.pair.right, true), summary_stats(pair_d)};
  report.rows[1] = {label_for(spec.pair.left, native_en, false), summary_stats(left_d)};
  report.rows[2] = {label_for(spec.pair.right, native_en, false), summary_stats(right_d)};
  return report;
}

OverlapReport overlap_table(const Corpus& corpus, const SampleSpec& spec, const AgencyPool& pool,
                            std::size_t k, const NeighborSource& source) {
  auto ids = sample_ids(corpus, spec);
  std::sort(ids.begin(), ids.end());

  OverlapReport report;
  report.spec = spec;
  report.pool = pool;
  report.k = k;
  if (pool.empty()) throw Error(Errc::invalid_argument, "agency pool is empty");
  const auto filter = native_english_from(pool);
  const auto left_nb = pool_neighbors(unit_vectors(corpus, ids, spec.pair.left), k, filter, source);
  const auto right_nb = pool_neighbors(unit_vectors(corpus, ids, spec.pair.right), k, filter, source);
  report.counts.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) report.counts[i] = {ids[i], key_overlap(left_nb[i], right_nb[i])};
  std::size_t total = 0;
  for (const auto& [id, c] : report.counts) total += c;
  report.average = static_cast<double>(total) / static_cast<double>(report.counts.size());
  return report;
}

Histogram distance_histogram(std::span<const double> values, std::size_t bins, std::string label) {
  if (bins == 0) throw Error(Errc::invalid_argument, "histogram needs at least one bin");
  constexpr double kSlack = 1e-9;
  Histogram h;
  h.label = std::move(label);
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges[b] = kMaxUnitDistance * static_cast<double>(b) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  for (double v : values) {
    if (!(v >= 0.0 && v <= kMaxUnitDistance + kSlack)) {
      throw Error(Errc::range, "distance " + std::to_string(v) + " outside [0, 2]");
    }
    auto b = static_cast<std::size_t>(v / kMaxUnitDistance * static_cast<double>(bins));
    // The computed bin can be one off near an edge; settle against the edges.
    b = std::min(b, bins - 1);
    while (b > 0 && v < h.edges[b]) --b;
    while (b + 1 < bins && v >= h.edges[b + 1]) ++b;
    ++h.counts[b];
  }
  return h;
}

}  // namespace xld
