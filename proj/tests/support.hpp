#pragma once

// Helpers shared by the unit tests: scratch directories, random vectors,
// corpus writers and a naive neighbor oracle.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "xld/corpus.hpp"
#include "xld/knn.hpp"
#include "xld/metrics.hpp"

namespace xld::test {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("xld_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::vector<float> gaussian_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<float> normal;
  std::vector<float> v(dim);
  for (auto& x : v) x = normal(rng);
  return v;
}

inline std::vector<float> random_unit(std::size_t dim, std::mt19937_64& rng) {
  return normalize(gaussian_vector(dim, rng));
}

inline std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

/// NIH native-English points keyed p00000.. in input order.
inline PointSet make_points(const std::vector<std::vector<float>>& vectors) {
  PointSet points(vectors.empty() ? 0 : vectors.front().size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    points.add({{numbered("p", i), CoordinateType::native_en}, Agency::nih()}, vectors[i]);
  }
  return points;
}

/// Every distance through euclidean(), then a full sort by (distance, key).
inline NeighborList naive_knn(const PointSet& points, std::span<const float> q, std::size_t k,
                              const Filter& filter) {
  NeighborList all;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!filter(points.meta(i))) continue;
    all.push_back({i, points.meta(i).key, euclidean(q, points.row(i))});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.key < b.key;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

inline std::string record_line(const std::string& id, const std::string& agency, const std::string& type,
                               const std::string& title = "t", const std::string& abstract = "a") {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["agency"] = agency;
  j["coordinate_type"] = type;
  j["title"] = title;
  j["abstract"] = abstract;
  return j.dump() + "\n";
}

/// Records as JSONL plus the vector file, for CLI runs.
inline void write_corpus(const Corpus& corpus, const fs::path& records, const fs::path& vectors) {
  std::string text;
  for (const auto& [key, entry] : corpus.entries()) {
    const auto& r = entry.record;
    text += record_line(r.id, r.agency.name(), std::string(to_string(r.type)), r.title, r.abstract);
  }
  write_file(records, text);
  write_vectors(corpus, vectors);
}

/// Adds a complete KAKENHI pair with the given vectors.
inline void add_pair(Corpus& c, const std::string& id, std::vector<float> left, std::vector<float> right,
                     CoordinateType lt = CoordinateType::native_ja, CoordinateType rt = CoordinateType::mt_en) {
  c.add_record({id, Agency::kakenhi(), lt, "title", "abstract", std::nullopt});
  c.add_record({id, Agency::kakenhi(), rt, "title", "abstract", std::nullopt});
  c.attach_vector({id, lt}, std::move(left));
  c.attach_vector({id, rt}, std::move(right));
}

inline void add_pool_point(Corpus& c, const std::string& id, const Agency& agency, std::vector<float> v) {
  c.add_record({id, agency, CoordinateType::native_en, "title", "abstract", std::nullopt});
  c.attach_vector({id, CoordinateType::native_en}, std::move(v));
}

/// 384-d vector with the given leading components and zeros elsewhere.
inline std::vector<float> embed(std::initializer_list<float> head) {
  std::vector<float> v(kEmbeddingDim, 0.0f);
  std::copy(head.begin(), head.end(), v.begin());
  return v;
}

}  // namespace xld::test
