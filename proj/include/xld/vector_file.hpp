#pragma once

// Little-endian "XLDV" vector container:
//   magic "XLDV" | u32 version=1 | u32 dimension | u64 count
//   count x ( u16 key_length | key bytes | dimension x f32 )

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xld {

inline constexpr std::uint32_t kVectorFileVersion = 1;

struct VectorEntry {
  std::string key;  // "id\0coordinate_type"
  std::vector<float> values;
};

struct VectorFile {
  std::uint32_t dimension = 0;
  std::vector<VectorEntry> entries;
};

/// Throws Errc::dimension if the entries disagree on dimension (before
/// opening the file) and Errc::io on write failure.
void write_vector_file(const std::filesystem::path& path, std::uint32_t dimension,
                       const std::vector<VectorEntry>& entries);

/// Throws Errc::io if unreadable and Errc::format on a bad magic, version,
/// or truncated payload.
VectorFile read_vector_file(const std::filesystem::path& path);

std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::uint64_t file_fingerprint(const std::filesystem::path& path);

}  // namespace xld
