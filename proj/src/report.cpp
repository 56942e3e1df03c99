#include "xld/report.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

namespace xld {
namespace {

using nlohmann::ordered_json;

ordered_json meta(const SampleSpec& spec, const AgencyPool& pool, std::size_t k) {
  ordered_json m;
  m["kind"] = "meta";
  m["pair"] = to_string(spec.pair);
  m["agency"] = spec.agency.name();
  m["n"] = spec.n;
  m["seed"] = spec.seed;
  m["pool"] = to_string(pool);
  m["k"] = k;
  return m;
}

std::string pad(std::string s, std::size_t width, bool left_align) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left_align ? s + fill : fill + s;
}

}  // namespace

std::string to_jsonl(const DistanceReport& report) {
  std::string out = meta(report.spec, report.pool, report.k).dump() + '\n';
  for (const auto& row : report.rows) {
    ordered_json j;
    j["kind"] = "row";
    j["label"] = row.label;
    j["mean"] = row.stats.mean;
    j["sd"] = row.stats.sd;
    j["var"] = row.stats.var;
    j["n"] = row.stats.n;
    out += j.dump() + '\n';
  }
  return out;
}

std::string to_jsonl(const OverlapReport& report) {
  std::string out = meta(report.spec, report.pool, report.k).dump() + '\n';
  for (const auto& [id, count] : report.counts) {
    ordered_json j;
    j["kind"] = "overlap";
    j["id"] = id;
    j["count"] = count;
    out += j.dump() + '\n';
  }
  ordered_json s;
  s["kind"] = "summary";
  s["average"] = report.average;
  s["average_1dp"] = format_fixed(report.average, 1);
  s["k"] = report.k;
  s["n"] = report.counts.size();
  out += s.dump() + '\n';
  return out;
}

std::string to_table(const DistanceReport& report) {
  std::size_t width = 4;
  for (const auto& row : report.rows) width = std::max(width, row.label.size());
  std::ostringstream os;
  os << pad("Item", width, true) << "  " << pad("Distance (avg)", 14, false) << "  "
     << pad("SD (s)", 8, false) << "  " << pad("Var (s^2)", 9, false) << '\n';
  os << std::string(width + 2 + 14 + 2 + 8 + 2 + 9, '-') << '\n';
  for (const auto& row : report.rows) {
    os << pad(row.label, width, true) << "  " << pad(format_fixed(row.stats.mean, 2), 14, false) << "  "
       << pad(format_fixed(row.stats.sd, 2), 8, false) << "  " << pad(format_fixed(row.stats.var, 2), 9, false)
       << '\n';
  }
  os << "(n=" << report.per_id.size() << ", random sampling, seed=" << report.spec.seed
     << ", k=" << report.k << ", pool=" << to_string(report.pool) << ")\n";
  return os.str();
}

std::string to_table(const OverlapReport& report) {
  const std::string label = std::string(to_string(report.spec.pair.left)) + " vs " +
                            std::string(to_string(report.spec.pair.right));
  const std::string header = "Average overlap (k=" + std::to_string(report.k) + ")";
  const std::size_t width = std::max<std::size_t>(label.size(), 4);
  std::ostringstream os;
  os << pad("Item", width, true) << "  " << header << '\n';
  os << std::string(width + 2 + header.size(), '-') << '\n';
  os << pad(label, width, true) << "  " << pad(format_fixed(report.average, 1), header.size(), false) << '\n';
  os << "(n=" << report.counts.size() << ", random sampling, seed=" << report.spec.seed
     << ", pool=" << to_string(report.pool) << ")\n";
  return os.str();
}

std::string to_tsv(const Histogram& histogram) {
  std::ostringstream os;
  os << "# " << histogram.label << '\n' << "bin_left\tcount\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    os << format_fixed(histogram.edges[b], 6) << '\t' << histogram.counts[b] << '\n';
  }
  return os.str();
}

std::string per_id_tsv(const DistanceReport& report) {
  std::ostringstream os;
  os << "id\tpair\tleft_pool\tright_pool\n";
  for (const auto& r : report.per_id) {
    os << r.id << '\t' << format_fixed(r.pair, 9) << '\t' << format_fixed(r.left_pool, 9) << '\t'
       << format_fixed(r.right_pool, 9) << '\n';
  }
  return os.str();
}

}  // namespace xld
