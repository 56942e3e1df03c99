#include <gtest/gtest.h>

#include <cstring>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "support.hpp"
#include "xld/error.hpp"
#include "xld/vector_file.hpp"

using namespace xld;
using namespace xld::test;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an xld::Error";
  return Errc::range;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Corpus from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_records(in);
}

// Little-endian byte builder, independent of the writer under test.
struct Bytes {
  std::string data;
  void u16(std::uint16_t v) { raw(&v, 2); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f32(float v) { raw(&v, 4); }
  void str(const std::string& s) { data += s; }
  void raw(const void* p, std::size_t n) {
    // The test host is little-endian; the format is defined little-endian.
    data.append(static_cast<const char*>(p), n);
  }
};

std::string four_line_fixture() {
  return record_line("J1", "KAKENHI", "native_ja") + record_line("J2", "KAKENHI", "native_ja") +
         record_line("S1", "NSF", "native_en") + record_line("H1", "NIH", "native_en");
}

}  // namespace

TEST(Records, FourLineFixtureCounts) {
  const Corpus c = from_text(four_line_fixture());
  EXPECT_EQ(c.size(), 4u);
  const std::map<std::string, std::size_t> expected{{"KAKENHI", 2}, {"NSF", 1}, {"NIH", 1}};
  EXPECT_EQ(c.agency_counts(), expected);
}

TEST(Records, EmptyInputGivesEmptyCorpus) {
  const Corpus c = from_text("");
  EXPECT_TRUE(c.empty());
  EXPECT_TRUE(c.agency_counts().empty());
  TempDir dir;
  write_file(dir / "empty.jsonl", "");
  EXPECT_TRUE(load_records(dir / "empty.jsonl").empty());
}

TEST(Records, BlankLinesSkippedAndOptionalYear) {
  const std::string text = "\n" + record_line("J1", "kakenhi", "NativeJa") +
                           "  \n{\"id\":\"H1\",\"agency\":\"NIH\",\"coordinate_type\":\"native_en\","
                           "\"title\":\"x\",\"abstract\":\"\",\"fiscal_year\":2019}\n";
  const Corpus c = from_text(text);
  ASSERT_EQ(c.size(), 2u);
  const auto* h = c.find({"H1", CoordinateType::native_en});
  ASSERT_NE(h, nullptr);
  EXPECT_EQ(h->fiscal_year, 2019);
  EXPECT_FALSE(h->complete());
  const auto* j = c.find({"J1", CoordinateType::native_ja});
  ASSERT_NE(j, nullptr);
  EXPECT_EQ(j->agency, Agency::kakenhi());
  EXPECT_FALSE(j->fiscal_year.has_value());
}

TEST(Records, MalformedLineReportsLineNumber) {
  const std::string text = four_line_fixture() + "{not json\n";
  EXPECT_EQ(code_of([&] { from_text(text); }), Errc::parse);
  EXPECT_NE(message_of([&] { from_text(text); }).find("line 5"), std::string::npos);
}

TEST(Records, MissingFieldIsParseError) {
  EXPECT_EQ(code_of([] { from_text("{\"id\":\"A\",\"agency\":\"NIH\",\"coordinate_type\":\"native_en\"}\n"); }),
            Errc::parse);
  EXPECT_EQ(code_of([] { from_text(record_line("A", "NIH", "klingon_en")); }), Errc::parse);
}

TEST(Records, DuplicateKeyNamesTheKey) {
  const std::string text = record_line("J1", "KAKENHI", "native_ja") + record_line("J1", "KAKENHI", "native_ja");
  EXPECT_EQ(code_of([&] { from_text(text); }), Errc::duplicate_key);
  const auto msg = message_of([&] { from_text(text); });
  EXPECT_NE(msg.find("J1/native_ja"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  // Same id under another coordinate type is a different key.
  EXPECT_EQ(from_text(record_line("J1", "KAKENHI", "native_ja") + record_line("J1", "KAKENHI", "mt_en")).size(), 2u);
}

TEST(Records, CoordinateTypeReservedByAgency) {
  EXPECT_EQ(code_of([] { from_text(record_line("J1", "KAKENHI", "native_en")); }), Errc::parse);
  EXPECT_EQ(code_of([] { from_text(record_line("H1", "NIH", "mt_en")); }), Errc::parse);
  EXPECT_TRUE(coordinate_allowed(Agency::parse("ERC"), CoordinateType::native_en));
}

TEST(Records, UnknownAgencyKeptAsExtension) {
  const Corpus c = from_text(record_line("X1", "ERC", "native_en"));
  const auto* r = c.find({"X1", CoordinateType::native_en});
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->agency.kind(), AgencyKind::other);
  EXPECT_EQ(r->agency.name(), "ERC");
  EXPECT_EQ(code_of([] { Agency::parse(""); }), Errc::parse);
}

TEST(Records, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { load_records("/nonexistent/records.jsonl"); }), Errc::io);
}

TEST(Records, IngestTwiceIsIdentical) {
  TempDir dir;
  Corpus c;
  std::mt19937_64 rng(5);
  add_pair(c, "J1", random_unit(kEmbeddingDim, rng), random_unit(kEmbeddingDim, rng));
  add_pool_point(c, "H1", Agency::nih(), random_unit(kEmbeddingDim, rng));
  write_corpus(c, dir / "r.jsonl", dir / "v.xldv");
  const Corpus a = load_vectors(load_records(dir / "r.jsonl"), dir / "v.xldv");
  const Corpus b = load_vectors(load_records(dir / "r.jsonl"), dir / "v.xldv");
  EXPECT_EQ(fingerprint(a), fingerprint(b));
  EXPECT_EQ(fingerprint(a), fingerprint(c));
  EXPECT_EQ(a.agency_counts(), b.agency_counts());
}

TEST(CorpusModel, PartitionReconstructsCorpus) {
  Corpus c = from_text(four_line_fixture() + record_line("U1", "UKRI", "native_en") +
                       record_line("J1", "KAKENHI", "mt_en"));
  std::set<RecordKey> seen;
  std::size_t total = 0;
  for (const auto& [agency, keys] : c.partition_by_agency()) {
    for (const auto& k : keys) {
      EXPECT_EQ(c.find(k)->agency, agency);
      EXPECT_TRUE(seen.insert(k).second) << "key in two partitions";
      ++total;
    }
  }
  EXPECT_EQ(total, c.size());
}

TEST(CorpusModel, AttachRejectsOrphansAndBadDimension) {
  Corpus c = from_text(four_line_fixture());
  EXPECT_EQ(code_of([&] { c.attach_vector({"ZZ", CoordinateType::native_en}, std::vector<float>(384)); }),
            Errc::orphan_vector);
  EXPECT_EQ(code_of([&] { c.attach_vector({"H1", CoordinateType::native_en}, std::vector<float>(383)); }),
            Errc::dimension);
  c.attach_vector({"H1", CoordinateType::native_en}, std::vector<float>(384, 1.0f));
  EXPECT_EQ(c.vector_count(), 1u);
}

TEST(CorpusModel, RecordKeyEncoding) {
  const RecordKey k{"KAK-123", CoordinateType::mt_en};
  const std::string enc = k.encoded();
  EXPECT_EQ(enc, std::string("KAK-123\0mt_en", 13));
  EXPECT_EQ(RecordKey::decode(enc), k);
  EXPECT_EQ(code_of([] { RecordKey::decode("no-separator"); }), Errc::format);
  EXPECT_EQ(parse_coordinate_type("AuthorEn"), CoordinateType::author_en);
}

namespace {

Corpus pairing_corpus() {
  Corpus c;
  std::mt19937_64 rng(11);
  auto v = [&] { return random_unit(kEmbeddingDim, rng); };
  add_pair(c, "A", v(), v());
  // B: Japanese only.
  c.add_record({"B", Agency::kakenhi(), CoordinateType::native_ja, "t", "a", std::nullopt});
  c.attach_vector({"B", CoordinateType::native_ja}, v());
  // C: translated title present but abstract empty.
  c.add_record({"C", Agency::kakenhi(), CoordinateType::native_ja, "t", "a", std::nullopt});
  c.add_record({"C", Agency::kakenhi(), CoordinateType::mt_en, "t", "", std::nullopt});
  c.attach_vector({"C", CoordinateType::native_ja}, v());
  c.attach_vector({"C", CoordinateType::mt_en}, v());
  // D: complete records, one vector missing.
  c.add_record({"D", Agency::kakenhi(), CoordinateType::native_ja, "t", "a", std::nullopt});
  c.add_record({"D", Agency::kakenhi(), CoordinateType::mt_en, "t", "a", std::nullopt});
  c.attach_vector({"D", CoordinateType::native_ja}, v());
  add_pair(c, "0first", v(), v());
  add_pair(c, "E", v(), v(), CoordinateType::native_ja, CoordinateType::author_en);
  return c;
}

}  // namespace

TEST(CompletePairs, PairwiseDeletion) {
  const Corpus c = pairing_corpus();
  const auto ids = filter_complete_pairs(c, CoordinateType::native_ja, CoordinateType::mt_en);
  EXPECT_EQ(ids, (std::vector<std::string>{"0first", "A"}));
  EXPECT_EQ(filter_complete_pairs(c, CoordinateType::native_ja, CoordinateType::author_en),
            std::vector<std::string>{"E"});
}

TEST(CompletePairs, Symmetric) {
  const Corpus c = pairing_corpus();
  const CoordinateType types[] = {CoordinateType::native_ja, CoordinateType::mt_en, CoordinateType::author_en,
                                  CoordinateType::native_en};
  for (auto a : types) {
    for (auto b : types) {
      if (a == b) continue;
      EXPECT_EQ(filter_complete_pairs(c, a, b), filter_complete_pairs(c, b, a));
    }
  }
}

TEST(CompletePairs, EmptyAndInvalid) {
  EXPECT_TRUE(filter_complete_pairs(Corpus{}, CoordinateType::native_ja, CoordinateType::mt_en).empty());
  EXPECT_EQ(code_of([] { filter_complete_pairs(Corpus{}, CoordinateType::mt_en, CoordinateType::mt_en); }),
            Errc::invalid_argument);
}

TEST(Normalized, UnitLengthAndDegenerate) {
  Corpus c = pairing_corpus();
  const Corpus n = normalized(c);
  for (const auto& [key, entry] : n.entries()) {
    if (entry.vector.empty()) continue;
    EXPECT_NEAR(norm(entry.vector), 1.0, 1e-6);
  }
  Corpus z;
  z.add_record({"Z", Agency::nih(), CoordinateType::native_en, "t", "a", std::nullopt});
  z.attach_vector({"Z", CoordinateType::native_en}, std::vector<float>(384, 0.0f));
  EXPECT_EQ(code_of([&] { normalized(z); }), Errc::degenerate_vector);
}

TEST(VectorFile, HandBuiltFileLoads) {
  TempDir dir;
  Bytes b;
  b.str("XLDV");
  b.u32(1);
  b.u32(3);
  b.u64(2);
  for (const std::string& key : {std::string("a\0native_en", 11), std::string("bb\0mt_en", 8)}) {
    b.u16(static_cast<std::uint16_t>(key.size()));
    b.str(key);
    for (float f : {1.5f, -2.0f, 0.25f}) b.f32(f);
  }
  write_file(dir / "v.xldv", b.data);
  const VectorFile vf = read_vector_file(dir / "v.xldv");
  EXPECT_EQ(vf.dimension, 3u);
  ASSERT_EQ(vf.entries.size(), 2u);
  EXPECT_EQ(vf.entries[1].key, std::string("bb\0mt_en", 8));
  EXPECT_EQ(vf.entries[0].values, (std::vector<float>{1.5f, -2.0f, 0.25f}));

  // And the writer produces exactly these bytes.
  write_vector_file(dir / "w.xldv", 3, vf.entries);
  EXPECT_EQ(read_file(dir / "w.xldv"), b.data);
}

TEST(VectorFile, RoundTripIsBitExact) {
  TempDir dir;
  Corpus c;
  std::mt19937_64 rng(3);
  for (std::size_t i = 0; i < 10; ++i) {
    auto v = gaussian_vector(kEmbeddingDim, rng);
    v[i] = std::numeric_limits<float>::denorm_min();
    v[i + 10] = -0.0f;
    add_pool_point(c, numbered("h", i), Agency::nih(), v);
  }
  write_vectors(c, dir / "v.xldv");
  Corpus records;
  for (const auto& [key, entry] : c.entries()) records.add_record(entry.record);
  const Corpus back = load_vectors(records, dir / "v.xldv");
  ASSERT_EQ(back.vector_count(), 10u);
  for (const auto& [key, entry] : c.entries()) {
    const auto got = back.vector(key);
    ASSERT_EQ(got.size(), entry.vector.size());
    EXPECT_EQ(std::memcmp(got.data(), entry.vector.data(), got.size_bytes()), 0) << to_string(key);
  }
}

TEST(VectorFile, ZeroPointsIsHeaderOnly) {
  TempDir dir;
  write_vectors(Corpus{}, dir / "v.xldv");
  const std::string bytes = read_file(dir / "v.xldv");
  EXPECT_EQ(bytes.size(), 20u);
  EXPECT_EQ(bytes.substr(0, 4), "XLDV");
  const VectorFile vf = read_vector_file(dir / "v.xldv");
  EXPECT_TRUE(vf.entries.empty());
  EXPECT_EQ(load_vectors(Corpus{}, dir / "v.xldv").vector_count(), 0u);
}

TEST(VectorFile, MixedDimensionsRefusedBeforeWriting) {
  TempDir dir;
  const std::vector<VectorEntry> entries{{"a", std::vector<float>(384)}, {"b", std::vector<float>(383)}};
  EXPECT_EQ(code_of([&] { write_vector_file(dir / "v.xldv", 384, entries); }), Errc::dimension);
  EXPECT_FALSE(fs::exists(dir / "v.xldv"));
}

TEST(VectorFile, LoadValidatesAgainstCorpus) {
  TempDir dir;
  Corpus records = from_text(four_line_fixture());
  write_vector_file(dir / "orphan.xldv", 384, {{RecordKey{"ZZ", CoordinateType::native_en}.encoded(),
                                                std::vector<float>(384, 1.0f)}});
  EXPECT_EQ(code_of([&] { load_vectors(records, dir / "orphan.xldv"); }), Errc::orphan_vector);
  write_vector_file(dir / "short.xldv", 383, {{RecordKey{"H1", CoordinateType::native_en}.encoded(),
                                               std::vector<float>(383, 1.0f)}});
  EXPECT_EQ(code_of([&] { load_vectors(records, dir / "short.xldv"); }), Errc::dimension);
  std::vector<VectorEntry> three;
  for (const char* id : {"J1", "J2"}) three.push_back({RecordKey{id, CoordinateType::native_ja}.encoded(),
                                                       std::vector<float>(384, 0.5f)});
  three.push_back({RecordKey{"S1", CoordinateType::native_en}.encoded(), std::vector<float>(384, 0.5f)});
  write_vector_file(dir / "ok.xldv", 384, three);
  EXPECT_EQ(load_vectors(records, dir / "ok.xldv").vector_count(), 3u);
}

TEST(VectorFile, CorruptFilesAreFormatErrors) {
  TempDir dir;
  write_vector_file(dir / "good.xldv", 4, {{"k\0native_en", {1, 2, 3, 4}}});
  const std::string good = read_file(dir / "good.xldv");

  auto check = [&](const std::string& bytes, const char* what) {
    write_file(dir / "bad.xldv", bytes);
    EXPECT_EQ(code_of([&] { read_vector_file(dir / "bad.xldv"); }), Errc::format) << what;
  };
  std::string bad_magic = good;
  bad_magic[0] = 'Y';
  check(bad_magic, "magic");
  std::string bad_version = good;
  bad_version[4] = 2;
  check(bad_version, "version");
  for (std::size_t cut : {std::size_t{3}, std::size_t{12}, std::size_t{21}, good.size() - 1}) {
    check(good.substr(0, cut), "truncated");
  }
  check(good + "x", "trailing bytes");
  std::string big_count = good;
  big_count[12] = 9;
  check(big_count, "count beyond payload");
  EXPECT_EQ(code_of([&] { read_vector_file(dir / "missing.xldv"); }), Errc::io);
}

TEST(VectorFile, FingerprintTracksContent) {
  TempDir dir;
  write_vector_file(dir / "a.xldv", 2, {{"k\0native_en", {1, 2}}});
  write_vector_file(dir / "b.xldv", 2, {{"k\0native_en", {1, 3}}});
  EXPECT_EQ(file_fingerprint(dir / "a.xldv"), file_fingerprint(dir / "a.xldv"));
  EXPECT_NE(file_fingerprint(dir / "a.xldv"), file_fingerprint(dir / "b.xldv"));
  // FNV-1a 64 reference values.
  EXPECT_EQ(fnv1a("", 0), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a", 1), 0xaf63dc4c8601ec8cULL);
}
