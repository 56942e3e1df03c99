#include "xld/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <json.hpp>

#include "xld/error.hpp"
#include "xld/metrics.hpp"
#include "xld/vector_file.hpp"

namespace xld {
namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string_view agency_name(AgencyKind kind) {
  switch (kind) {
    case AgencyKind::kakenhi: return "KAKENHI";
    case AgencyKind::nih: return "NIH";
    case AgencyKind::nsf: return "NSF";
    case AgencyKind::ukri: return "UKRI";
    case AgencyKind::other: break;
  }
  return "OTHER";
}

const std::string& require_string(const nlohmann::json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing field '") + field + "'");
  if (!it->is_string()) throw std::invalid_argument(std::string("field '") + field + "' is not a string");
  return it->get_ref<const std::string&>();
}

ProjectRecord record_from_json(const nlohmann::json& obj) {
  if (!obj.is_object()) throw std::invalid_argument("line is not an object");
  ProjectRecord r;
  r.id = require_string(obj, "id");
  if (r.id.empty()) throw std::invalid_argument("empty id");
  r.agency = Agency::parse(require_string(obj, "agency"));
  r.type = parse_coordinate_type(require_string(obj, "coordinate_type"));
  r.title = require_string(obj, "title");
  r.abstract = require_string(obj, "abstract");
  if (auto it = obj.find("fiscal_year"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw std::invalid_argument("field 'fiscal_year' is not an integer");
    r.fiscal_year = it->get<int>();
  }
  return r;
}

}  // namespace

Agency::Agency(AgencyKind kind) : kind_(kind), name_(agency_name(kind)) {}

Agency Agency::parse(std::string_view name) {
  if (name.empty()) throw Error(Errc::parse, "empty agency name");
  const std::string u = upper(name);
  for (auto kind : {AgencyKind::kakenhi, AgencyKind::nih, AgencyKind::nsf, AgencyKind::ukri}) {
    if (u == agency_name(kind)) return Agency(kind);
  }
  Agency a;
  a.kind_ = AgencyKind::other;
  a.name_ = std::string(name);
  return a;
}

std::string_view to_string(CoordinateType type) noexcept {
  switch (type) {
    case CoordinateType::native_ja: return "native_ja";
    case CoordinateType::mt_en: return "mt_en";
    case CoordinateType::author_en: return "author_en";
    case CoordinateType::native_en: return "native_en";
  }
  return "?";
}

CoordinateType parse_coordinate_type(std::string_view token) {
  static constexpr std::pair<std::string_view, CoordinateType> kNames[] = {
      {"native_ja", CoordinateType::native_ja}, {"NativeJa", CoordinateType::native_ja},
      {"mt_en", CoordinateType::mt_en},         {"MtEn", CoordinateType::mt_en},
      {"author_en", CoordinateType::author_en}, {"AuthorEn", CoordinateType::author_en},
      {"native_en", CoordinateType::native_en}, {"NativeEn", CoordinateType::native_en},
  };
  for (const auto& [name, type] : kNames) {
    if (token == name) return type;
  }
  throw Error(Errc::parse, "unknown coordinate type '" + std::string(token) + "'");
}

bool coordinate_allowed(const Agency& agency, CoordinateType type) noexcept {
  const bool kakenhi = agency.kind() == AgencyKind::kakenhi;
  return kakenhi != (type == CoordinateType::native_en);
}

std::string RecordKey::encoded() const {
  std::string s = id;
  s.push_back('\0');
  s += to_string(type);
  return s;
}

RecordKey RecordKey::decode(std::string_view encoded) {
  const auto nul = encoded.find('\0');
  if (nul == std::string_view::npos || nul == 0) {
    throw Error(Errc::format, "malformed vector key (expected id\\0coordinate_type)");
  }
  return {std::string(encoded.substr(0, nul)), parse_coordinate_type(encoded.substr(nul + 1))};
}

std::string to_string(const RecordKey& key) {
  return key.id + "/" + std::string(to_string(key.type));
}

void Corpus::add_record(ProjectRecord record) {
  if (!coordinate_allowed(record.agency, record.type)) {
    throw Error(Errc::parse, "coordinate type " + std::string(to_string(record.type)) +
                                 " is not valid for agency " + record.agency.name());
  }
  RecordKey key = record.key();
  auto [it, inserted] = entries_.try_emplace(std::move(key));
  if (!inserted) throw Error(Errc::duplicate_key, "duplicate record key " + to_string(it->first));
  it->second.record = std::move(record);
}

void Corpus::attach_vector(const RecordKey& key, std::vector<float> vector) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw Error(Errc::orphan_vector, "vector for unknown record " + to_string(key));
  if (vector.size() != kEmbeddingDim) {
    throw Error(Errc::dimension, "vector for " + to_string(key) + " has dimension " +
                                     std::to_string(vector.size()) + ", expected " +
                                     std::to_string(kEmbeddingDim));
  }
  if (it->second.vector.empty()) ++vector_count_;
  it->second.vector = std::move(vector);
}

const ProjectRecord* Corpus::find(const RecordKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second.record;
}

std::span<const float> Corpus::vector(const RecordKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return {};
  return it->second.vector;
}

std::map<std::string, std::size_t> Corpus::agency_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& [key, entry] : entries_) ++counts[entry.record.agency.name()];
  return counts;
}

std::map<Agency, std::vector<RecordKey>> Corpus::partition_by_agency() const {
  std::map<Agency, std::vector<RecordKey>> parts;
  for (const auto& [key, entry] : entries_) parts[entry.record.agency].push_back(key);
  return parts;
}

Corpus parse_records(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ProjectRecord record;
    try {
      record = record_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw Error(Errc::parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      corpus.add_record(std::move(record));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw Error(Errc::io, "read failed after line " + std::to_string(line_no));
  return corpus;
}

Corpus load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  try {
    return parse_records(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Corpus load_vectors(Corpus corpus, const std::filesystem::path& path) {
  VectorFile vf = read_vector_file(path);
  if (vf.dimension != kEmbeddingDim) {
    throw Error(Errc::dimension, path.string() + ": dimension " + std::to_string(vf.dimension) +
                                     ", expected " + std::to_string(kEmbeddingDim));
  }
  for (auto& e : vf.entries) {
    corpus.attach_vector(RecordKey::decode(e.key), std::move(e.values));
  }
  return corpus;
}

void write_vectors(const Corpus& corpus, const std::filesystem::path& path) {
  std::vector<VectorEntry> entries;
  entries.reserve(corpus.vector_count());
  for (const auto& [key, entry] : corpus.entries()) {
    if (entry.vector.empty()) continue;
    entries.push_back({key.encoded(), entry.vector});
  }
  write_vector_file(path, static_cast<std::uint32_t>(kEmbeddingDim), entries);
}

std::vector<std::string> filter_complete_pairs(const Corpus& corpus, CoordinateType left,
                                               CoordinateType right) {
  if (left == right) throw Error(Errc::invalid_argument, "pair sides must differ");
  auto usable = [&](const std::string& id, CoordinateType type) {
    auto it = corpus.entries().find(RecordKey{id, type});
    return it != corpus.entries().end() && it->second.record.complete() &&
           !it->second.vector.empty();
  };
  std::vector<std::string> ids;
  for (const auto& [key, entry] : corpus.entries()) {
    // Visit each id once, through its `left` entry.
    if (key.type != left) continue;
    if (usable(key.id, left) && usable(key.id, right)) ids.push_back(key.id);
  }
  // Map order is (id, type), so ids are already ascending.
  return ids;
}

Corpus normalized(const Corpus& corpus) {
  Corpus out = corpus;
  for (const auto& [key, entry] : corpus.entries()) {
    if (entry.vector.empty()) continue;
    try {
      out.attach_vector(key, normalize(entry.vector));
    } catch (const Error& e) {
      throw Error(e.code(), to_string(key) + ": " + e.what());
    }
  }
  return out;
}

std::uint64_t fingerprint(const Corpus& corpus) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, entry] : corpus.entries()) {
    const std::string k = key.encoded();
    h = fnv1a(k.data(), k.size(), h);
    for (float f : entry.vector) {
      const std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
      const unsigned char le[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                                   static_cast<unsigned char>(bits >> 16),
                                   static_cast<unsigned char>(bits >> 24)};
      h = fnv1a(le, 4, h);
    }
  }
  return h;
}

}  // namespace xld
