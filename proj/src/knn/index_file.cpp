#include <fstream>

#include "xld/error.hpp"
#include "xld/knn.hpp"

namespace xld {
namespace {

constexpr char kMagic[4] = {'X', 'L', 'G', 'I'};
constexpr std::uint32_t kIndexVersion = 1;

template <typename UInt>
void put(std::ostream& out, UInt v) {
  char b[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, sizeof b);
}

template <typename UInt>
UInt get(std::istream& in, const std::filesystem::path& path) {
  unsigned char b[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof b)) {
    throw Error(Errc::format, path.string() + ": truncated index file");
  }
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(b[i]) << (8 * i);
  return v;
}

}  // namespace

IndexFile to_index_file(const GraphIndex& index) {
  IndexFile f;
  f.mode = IndexMode::graph;
  f.degree = static_cast<std::uint32_t>(index.degree());
  f.count = index.size();
  f.build_seed = index.build_seed();
  f.points_fingerprint = fingerprint(index.points());
  f.adjacency = index.adjacency();
  return f;
}

IndexFile exact_index_file(const PointSet& points) {
  IndexFile f;
  f.mode = IndexMode::exact;
  f.count = points.size();
  f.points_fingerprint = fingerprint(points);
  return f;
}

void write_index_file(const std::filesystem::path& path, const IndexFile& file) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kIndexVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(file.mode));
  put<std::uint32_t>(out, file.degree);
  put<std::uint64_t>(out, file.count);
  put<std::uint64_t>(out, file.build_seed);
  put<std::uint64_t>(out, file.points_fingerprint);
  for (std::uint32_t v : file.adjacency) put<std::uint32_t>(out, v);
  out.close();
  if (!out) throw Error(Errc::io, "write failed: " + path.string());
}

IndexFile read_index_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw Error(Errc::format, path.string() + ": bad magic, expected XLGI");
  }
  if (const auto v = get<std::uint32_t>(in, path); v != kIndexVersion) {
    throw Error(Errc::format, path.string() + ": unsupported index version " + std::to_string(v));
  }
  IndexFile f;
  const auto mode = get<std::uint32_t>(in, path);
  if (mode > 1) throw Error(Errc::format, path.string() + ": unknown index mode");
  f.mode = static_cast<IndexMode>(mode);
  f.degree = get<std::uint32_t>(in, path);
  f.count = get<std::uint64_t>(in, path);
  f.build_seed = get<std::uint64_t>(in, path);
  f.points_fingerprint = get<std::uint64_t>(in, path);
  if (f.mode == IndexMode::graph) {
    f.adjacency.resize(f.count * f.degree);
    for (auto& v : f.adjacency) v = get<std::uint32_t>(in, path);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(Errc::format, path.string() + ": trailing bytes in index file");
  }
  return f;
}

GraphIndex graph_from_file(PointSet points, const IndexFile& file) {
  if (file.mode != IndexMode::graph) throw Error(Errc::format, "index file holds no graph (exact mode)");
  if (file.count != points.size() || file.points_fingerprint != fingerprint(points)) {
    throw Error(Errc::format, "index file was built for a different corpus");
  }
  return GraphIndex(std::move(points), file.degree, file.build_seed, file.adjacency);
}

}  // namespace xld
