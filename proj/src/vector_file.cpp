#include "xld/vector_file.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "xld/error.hpp"

namespace xld {
namespace {

constexpr std::array<char, 4> kMagic{'X', 'L', 'D', 'V'};

template <typename UInt>
void put_le(std::string& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xffu));
  }
}

class Reader {
 public:
  Reader(const std::string& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  template <typename UInt>
  UInt get_le(const char* what) {
    need(sizeof(UInt), what);
    UInt value = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
      value |= static_cast<UInt>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(UInt);
    return value;
  }

  std::string get_bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(Errc::format, path_.string() + ": truncated while reading " + what);
    }
  }

  const std::string& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::io, "read failed: " + path.string());
  return bytes;
}

}  // namespace

void write_vector_file(const std::filesystem::path& path, std::uint32_t dimension,
                       const std::vector<VectorEntry>& entries) {
  for (const auto& e : entries) {
    if (e.values.size() != dimension) {
      throw Error(Errc::dimension, "vector of dimension " + std::to_string(e.values.size()) +
                                       " in a file of dimension " + std::to_string(dimension));
    }
    if (e.key.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(Errc::format, "vector key longer than 65535 bytes");
    }
  }

  std::string out;
  out.reserve(20 + entries.size() * (16 + dimension * 4));
  out.append(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVectorFileVersion);
  put_le<std::uint32_t>(out, dimension);
  put_le<std::uint64_t>(out, entries.size());
  for (const auto& e : entries) {
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.key.size()));
    out += e.key;
    for (float f : e.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(Errc::io, "cannot open for writing: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  file.close();
  if (!file) throw Error(Errc::io, "write failed: " + path.string());
}

VectorFile read_vector_file(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  Reader r(bytes, path);

  if (r.get_bytes(4, "magic") != std::string(kMagic.data(), kMagic.size())) {
    throw Error(Errc::format, path.string() + ": bad magic, expected XLDV");
  }
  const auto version = r.get_le<std::uint32_t>("version");
  if (version != kVectorFileVersion) {
    throw Error(Errc::format, path.string() + ": unsupported version " + std::to_string(version));
  }

  VectorFile vf;
  vf.dimension = r.get_le<std::uint32_t>("dimension");
  const auto count = r.get_le<std::uint64_t>("count");
  // Each entry needs at least the key length and the payload.
  const std::uint64_t min_entry = 2 + std::uint64_t{vf.dimension} * 4;
  if (count > r.remaining() / min_entry) {
    throw Error(Errc::format, path.string() + ": truncated, header count " +
                                  std::to_string(count) + " exceeds payload");
  }

  vf.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    VectorEntry e;
    const auto key_len = r.get_le<std::uint16_t>("key length");
    e.key = r.get_bytes(key_len, "key");
    e.values.resize(vf.dimension);
    for (auto& v : e.values) v = std::bit_cast<float>(r.get_le<std::uint32_t>("vector component"));
    vf.entries.push_back(std::move(e));
  }
  if (!r.at_end()) {
    throw Error(Errc::format, path.string() + ": trailing bytes after last vector");
  }
  return vf;
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) noexcept {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  return fnv1a(bytes.data(), bytes.size());
}

}  // namespace xld
