#pragma once

// Project records, their embedding vectors, and the record/vector files.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xld {

inline constexpr std::size_t kEmbeddingDim = 384;

enum class AgencyKind { kakenhi, nih, nsf, ukri, other };

/// Funding agency. The four known agencies have fixed kinds; anything else
/// is carried verbatim under AgencyKind::other.
class Agency {
 public:
  Agency() = default;
  explicit Agency(AgencyKind kind);

  /// Case-insensitive for the known names; other strings become extension
  /// tags. Throws Errc::parse on an empty name.
  static Agency parse(std::string_view name);

  static Agency kakenhi() { return Agency(AgencyKind::kakenhi); }
  static Agency nih() { return Agency(AgencyKind::nih); }
  static Agency nsf() { return Agency(AgencyKind::nsf); }
  static Agency ukri() { return Agency(AgencyKind::ukri); }

  AgencyKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Agency& a, const Agency& b) { return a.name_ == b.name_; }
  friend auto operator<=>(const Agency& a, const Agency& b) { return a.name_ <=> b.name_; }

 private:
  AgencyKind kind_ = AgencyKind::kakenhi;
  std::string name_ = "KAKENHI";
};

enum class CoordinateType { native_ja, mt_en, author_en, native_en };

std::string_view to_string(CoordinateType type) noexcept;
/// Accepts the snake_case token ("mt_en") or the CamelCase name ("MtEn").
CoordinateType parse_coordinate_type(std::string_view token);

/// NativeEn belongs to non-KAKENHI agencies; the other three to KAKENHI.
bool coordinate_allowed(const Agency& agency, CoordinateType type) noexcept;

struct RecordKey {
  std::string id;
  CoordinateType type = CoordinateType::native_ja;

  /// "id\0type" as stored in the vector file.
  std::string encoded() const;
  static RecordKey decode(std::string_view encoded);

  friend bool operator==(const RecordKey&, const RecordKey&) = default;
  friend auto operator<=>(const RecordKey&, const RecordKey&) = default;
};

std::string to_string(const RecordKey& key);

struct ProjectRecord {
  std::string id;
  Agency agency;
  CoordinateType type = CoordinateType::native_ja;
  std::string title;
  std::string abstract;
  std::optional<int> fiscal_year;

  bool complete() const noexcept { return !title.empty() && !abstract.empty(); }
  RecordKey key() const { return {id, type}; }
};

/// Records plus their (optional) vectors, keyed by (id, coordinate type).
/// Iteration order is ascending by key. Populated by the loaders and the
/// synthetic generators; treated as immutable once built.
class Corpus {
 public:
  struct Entry {
    ProjectRecord record;
    std::vector<float> vector;  // empty when no vector is attached
  };

  /// Throws Errc::duplicate_key or Errc::parse (coordinate/agency mismatch).
  void add_record(ProjectRecord record);
  /// Throws Errc::orphan_vector or Errc::dimension.
  void attach_vector(const RecordKey& key, std::vector<float> vector);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t vector_count() const noexcept { return vector_count_; }

  const ProjectRecord* find(const RecordKey& key) const;
  /// Empty span when the key has no vector.
  std::span<const float> vector(const RecordKey& key) const;

  const std::map<RecordKey, Entry>& entries() const noexcept { return entries_; }

  std::map<std::string, std::size_t> agency_counts() const;
  std::map<Agency, std::vector<RecordKey>> partition_by_agency() const;

 private:
  std::map<RecordKey, Entry> entries_;
  std::size_t vector_count_ = 0;
};

Corpus load_records(const std::filesystem::path& path);
Corpus parse_records(std::istream& in);

/// Returns a copy of `corpus` with the vectors of `path` attached.
Corpus load_vectors(Corpus corpus, const std::filesystem::path& path);
/// Writes every attached vector in key order.
void write_vectors(const Corpus& corpus, const std::filesystem::path& path);

/// Ids having complete records and vectors for both coordinate types,
/// ascending. Implements pairwise deletion for a single comparison.
std::vector<std::string> filter_complete_pairs(const Corpus& corpus,
                                               CoordinateType left,
                                               CoordinateType right);

/// Copy with every vector scaled to unit length (Errc::degenerate_vector).
Corpus normalized(const Corpus& corpus);

/// Stable 64-bit FNV-1a fingerprint of keys and raw vector bytes.
std::uint64_t fingerprint(const Corpus& corpus);

}  // namespace xld
