#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "xld/error.hpp"
#include "xld/projection.hpp"
#include "xld/report.hpp"
#include "xld/vector_file.hpp"

namespace xld::cli {
namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int parse_uint(std::string_view key, std::string_view text) {
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::invalid_argument, "setting '" + std::string(key) + "' expects a non-negative integer, got '" +
                                            std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw Error(Errc::invalid_argument, "setting '" + std::string(key) + "' expects a boolean, got '" +
                                          std::string(text) + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Files are staged as "<name>.partial" and renamed on commit(); anything
/// staged or renamed is removed if the set is destroyed uncommitted.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : staged_) {
      fs::remove(partial(f), ec);
      fs::remove(f, ec);
    }
  }

  fs::path stage_path(const std::string& name) {
    fs::path target = dir_ / name;
    staged_.push_back(target);
    return partial(target);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path tmp = stage_path(name);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot open for writing: " + tmp.string());
    out << content;
    out.close();
    if (!out) throw Error(Errc::io, "write failed: " + tmp.string());
  }

  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& f : staged_) n.push_back(f.filename().string());
    return n;
  }

  void commit() {
    for (const auto& f : staged_) fs::rename(partial(f), f);
    committed_ = true;
  }

 private:
  static fs::path partial(const fs::path& p) { return fs::path(p.string() + ".partial"); }

  fs::path dir_;
  std::vector<fs::path> staged_;
  bool committed_ = false;
};

/// Runs a command body and maps failures to exit codes, prefixing the
/// stage that failed.
template <typename Body>
int guarded(const char* command, std::ostream& err, Body body) {
  std::string stage = "setup";
  try {
    return body(stage);
  } catch (const Error& e) {
    err << "xld " << command << ": " << stage << ": " << to_string(e.code()) << ": " << e.what() << '\n';
    if (e.code() == Errc::invalid_argument) return kUsage;
    return is_data_error(e.code()) ? kDataError : kComputeError;
  } catch (const std::exception& e) {
    err << "xld " << command << ": " << stage << ": " << e.what() << '\n';
    return kComputeError;
  }
}

void require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(Errc::invalid_argument, std::string("missing --") + what);
}

Corpus load_corpus(const RunConfig& config, std::string& stage, bool need_vectors) {
  stage = "load records";
  require_path(config.records, "records");
  Corpus corpus = load_records(config.records);
  if (need_vectors || !config.vectors.empty()) {
    stage = "load vectors";
    require_path(config.vectors, "vectors");
    corpus = load_vectors(std::move(corpus), config.vectors);
  }
  return corpus;
}

nlohmann::ordered_json input_entry(const fs::path& p) {
  nlohmann::ordered_json j;
  j["path"] = p.string();
  j["fnv1a64"] = hex64(file_fingerprint(p));
  return j;
}

nlohmann::ordered_json manifest(const char* command, const RunConfig& config) {
  nlohmann::ordered_json m;
  m["tool"] = "xld";
  m["version"] = XLD_VERSION;
  m["command"] = command;
  nlohmann::ordered_json cfg;
  for (const auto& [k, v] : settings(config)) cfg[k] = v;
  m["config"] = cfg;
  nlohmann::ordered_json inputs;
  if (!config.records.empty()) inputs["records"] = input_entry(config.records);
  if (!config.vectors.empty()) inputs["vectors"] = input_entry(config.vectors);
  m["inputs"] = inputs;
  return m;
}

fs::path index_path(const RunConfig& config) {
  return config.index.empty() ? config.out / "index.xlgi" : config.index;
}

SampleSpec sample_spec(const RunConfig& config) {
  SampleSpec s;
  s.seed = config.seed;
  s.n = config.n;
  s.pair = config.pair;
  return s;
}

void prepare_out(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw Error(Errc::io, "cannot create output directory " + config.out.string() + ": " + ec.message());
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "records") c.records = value;
  else if (key == "vectors") c.vectors = value;
  else if (key == "index") c.index = value;
  else if (key == "out") c.out = value;
  else if (key == "pair") c.pair = parse_pair(value);
  else if (key == "pool") c.pool = parse_pool(value);
  else if (key == "k") c.k = parse_uint<std::size_t>(key, value);
  else if (key == "n") c.n = parse_uint<std::size_t>(key, value);
  else if (key == "seed") c.seed = parse_uint<std::uint64_t>(key, value);
  else if (key == "degree") c.degree = parse_uint<std::size_t>(key, value);
  else if (key == "build_seed") c.build_seed = parse_uint<std::uint64_t>(key, value);
  else if (key == "pool_size") c.search.pool_size = parse_uint<std::size_t>(key, value);
  else if (key == "entry_count") c.search.entry_count = parse_uint<std::size_t>(key, value);
  else if (key == "max_evaluations") c.search.max_evaluations = parse_uint<std::size_t>(key, value);
  else if (key == "exact") c.exact = parse_bool(key, value);
  else if (key == "bins") c.bins = parse_uint<std::size_t>(key, value);
  else throw Error(Errc::invalid_argument, "unknown setting '" + std::string(key) + "'");
}

void apply_config_file(RunConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::invalid_argument, "cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::invalid_argument, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(config, trim(std::string_view(line).substr(0, eq)), std::string_view(line).substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::map<std::string, std::string> settings(const RunConfig& c) {
  return {
      {"records", c.records.string()},
      {"vectors", c.vectors.string()},
      {"index", c.index.string()},
      {"out", c.out.string()},
      {"pair", to_string(c.pair)},
      {"pool", to_string(c.pool)},
      {"k", std::to_string(c.k)},
      {"n", std::to_string(c.n)},
      {"seed", std::to_string(c.seed)},
      {"degree", std::to_string(c.degree)},
      {"build_seed", std::to_string(c.build_seed)},
      {"pool_size", std::to_string(c.search.pool_size)},
      {"entry_count", std::to_string(c.search.entry_count)},
      {"max_evaluations", std::to_string(c.search.max_evaluations)},
      {"exact", c.exact ? "true" : "false"},
      {"bins", std::to_string(c.bins)},
  };
}

int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("ingest", err, [&](std::string& stage) {
    const Corpus corpus = load_corpus(config, stage, false);
    stage = "write summary";
    prepare_out(config);
    OutputSet outputs(config.out);

    auto m = manifest("ingest", config);
    nlohmann::ordered_json counts;
    for (const auto& [agency, count] : corpus.agency_counts()) counts[agency] = count;
    m["records"] = corpus.size();
    m["vectors"] = corpus.vector_count();
    m["agency_counts"] = counts;
    outputs.write("corpus_summary.json", m.dump(2) + '\n');
    outputs.commit();

    out << "records " << corpus.size() << "  vectors " << corpus.vector_count() << '\n';
    for (const auto& [agency, count] : corpus.agency_counts()) out << "  " << agency << '\t' << count << '\n';
    return kOk;
  });
}

int cmd_index(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("index", err, [&](std::string& stage) {
    const Corpus corpus = load_corpus(config, stage, true);
    stage = "normalize";
    PointSet points = points_from_corpus(corpus);
    prepare_out(config);
    const fs::path target = index_path(config);
    OutputSet outputs(target.parent_path().empty() ? fs::path(".") : target.parent_path());

    const auto start = std::chrono::steady_clock::now();
    IndexFile file;
    if (config.exact) {
      stage = "record exact mode";
      file = exact_index_file(points);
    } else {
      stage = "build graph";
      file = to_index_file(build_graph(std::move(points), config.degree, config.build_seed));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    stage = "write index";
    write_index_file(outputs.stage_path(target.filename().string()), file);
    auto m = manifest("index", config);
    m["mode"] = file.mode == IndexMode::exact ? "exact" : "graph";
    m["points"] = file.count;
    m["degree"] = file.degree;
    m["points_fnv1a64"] = hex64(file.points_fingerprint);
    outputs.write("index.manifest.json", m.dump(2) + '\n');
    outputs.commit();

    out << "mode " << (config.exact ? "exact" : "graph") << "  points " << file.count << "  degree "
        << file.degree << "  seconds " << seconds << '\n';
    return kOk;
  });
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("analyze", err, [&](std::string& stage) {
    const Corpus corpus = load_corpus(config, stage, true);
    stage = "normalize";
    PointSet points = points_from_corpus(corpus);

    stage = "load index";
    auto m = manifest("analyze", config);
    std::optional<ExactIndex> exact;
    std::optional<GraphIndex> graph;
    if (config.exact) {
      exact.emplace(std::move(points));
      m["index_mode"] = "exact";
    } else if (!config.index.empty()) {
      const IndexFile file = read_index_file(config.index);
      m["inputs"]["index"] = input_entry(config.index);
      if (file.mode == IndexMode::exact) {
        if (file.points_fingerprint != fingerprint(points)) {
          throw Error(Errc::format, "index file was built for a different corpus");
        }
        exact.emplace(std::move(points));
        m["index_mode"] = "exact";
      } else {
        graph.emplace(graph_from_file(std::move(points), file));
        m["index_mode"] = "graph";
      }
    } else {
      stage = "build graph";
      graph.emplace(build_graph(std::move(points), config.degree, config.build_seed));
      m["index_mode"] = "graph (built in memory)";
    }
    std::optional<GraphSearcher> searcher;
    if (graph) searcher.emplace(*graph, config.search);
    const NeighborSource& source = exact ? static_cast<const NeighborSource&>(*exact) : *searcher;

    const SampleSpec spec = sample_spec(config);
    stage = "distance table";
    const DistanceReport distances = distance_table(corpus, spec, config.pool, config.k, source);
    stage = "overlap table";
    const OverlapReport overlaps = overlap_table(corpus, spec, config.pool, config.k, source);

    stage = "histograms";
    std::vector<double> pair_d, left_d, right_d;
    for (const auto& r : distances.per_id) {
      pair_d.push_back(r.pair);
      left_d.push_back(r.left_pool);
      right_d.push_back(r.right_pool);
    }
    const Histogram h_pair = distance_histogram(pair_d, config.bins, distances.rows[0].label);
    const Histogram h_left = distance_histogram(left_d, config.bins, distances.rows[1].label);
    const Histogram h_right = distance_histogram(right_d, config.bins, distances.rows[2].label);

    stage = "write outputs";
    prepare_out(config);
    OutputSet outputs(config.out);
    outputs.write("distance_report.jsonl", to_jsonl(distances));
    outputs.write("distance_report.txt", to_table(distances));
    outputs.write("distances_per_id.tsv", per_id_tsv(distances));
    outputs.write("overlap_report.jsonl", to_jsonl(overlaps));
    outputs.write("overlap_report.txt", to_table(overlaps));
    outputs.write("histogram_pair.tsv", to_tsv(h_pair));
    outputs.write("histogram_left_pool.tsv", to_tsv(h_left));
    outputs.write("histogram_right_pool.tsv", to_tsv(h_right));
    m["outputs"] = outputs.names();
    outputs.write("analyze.manifest.json", m.dump(2) + '\n');
    outputs.commit();

    out << to_table(distances) << '\n' << to_table(overlaps);
    return kOk;
  });
}

int cmd_project(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("project", err, [&](std::string& stage) {
    const Corpus corpus = load_corpus(config, stage, true);
    stage = "sample";
    const auto ids = sample_ids(corpus, sample_spec(config));

    stage = "project";
    PointSet points(kEmbeddingDim);
    for (const auto& id : ids) {
      for (auto type : {config.pair.left, config.pair.right}) {
        const RecordKey key{id, type};
        points.add({key, corpus.find(key)->agency}, normalize(corpus.vector(key)));
      }
    }
    const Projection2D projection = pca_2d(points);

    stage = "write outputs";
    prepare_out(config);
    OutputSet outputs(config.out);
    export_plot_data(projection, outputs.stage_path("projection.tsv"));
    auto m = manifest("project", config);
    m["explained_variance"] = {format_fixed(projection.explained[0], 6), format_fixed(projection.explained[1], 6)};
    m["points"] = projection.points.size();
    outputs.write("project.manifest.json", m.dump(2) + '\n');
    outputs.commit();

    out << "points " << projection.points.size() << "  explained " << format_fixed(projection.explained[0], 4)
        << " " << format_fixed(projection.explained[1], 4) << '\n';
    return kOk;
  });
}

int cmd_sample(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("sample", err, [&](std::string& stage) {
    // Eligibility needs both vectors, so the sample matches analyze's.
    const Corpus corpus = load_corpus(config, stage, true);
    stage = "sample";
    const auto ids = sample_ids(corpus, sample_spec(config));

    stage = "write outputs";
    prepare_out(config);
    OutputSet outputs(config.out);
    std::string text;
    for (const auto& id : ids) text += id + '\n';
    outputs.write("sample.txt", text);
    outputs.write("sample.manifest.json", manifest("sample", config).dump(2) + '\n');
    outputs.commit();
    out << "sampled " << ids.size() << " ids\n";
    return kOk;
  });
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cross-lingual drift measurements over paired embedding corpora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", XLD_VERSION);

  // Flags are kept as text and funneled through apply_setting so the file,
  // environment and command line share one parser.
  std::string config_path;
  std::map<std::string, std::string> flag_values;
  bool exact_flag = false;

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&, std::ostream&);
  };
  const Command commands[] = {
      {"ingest", "Load records (and vectors) and report per-agency counts", cmd_ingest},
      {"index", "Build and save the neighbor graph over all vectors", cmd_index},
      {"analyze", "Distance and overlap tables, histograms and a run manifest", cmd_analyze},
      {"project", "Two-component principal projection of sampled pairs", cmd_project},
      {"sample", "Write the seeded project sample", cmd_sample},
  };
  const std::pair<const char*, const char*> value_flags[] = {
      {"--records", "records"},   {"--vectors", "vectors"},
      {"--index", "index"},       {"--out", "out"},
      {"--pair", "pair"},         {"--pool", "pool"},
      {"--k", "k"},               {"--n", "n"},
      {"--seed", "seed"},         {"--degree", "degree"},
      {"--build-seed", "build_seed"}, {"--pool-size", "pool_size"},
      {"--entry-count", "entry_count"}, {"--max-evaluations", "max_evaluations"},
      {"--bins", "bins"},
  };

  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "Key-value config file");
    for (const auto& [flag, key] : value_flags) {
      sub->add_option_function<std::string>(
          flag, [&flag_values, key = std::string(key)](const std::string& v) { flag_values[key] = v; },
          std::string("Override setting '") + key + "'");
    }
    sub->add_flag("--exact", exact_flag, "Use the brute-force oracle instead of the graph");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) apply_config_file(config, config_path);
    apply_env(config, [](const char* name) { return std::getenv(name); });
    for (const auto& [key, value] : flag_values) apply_setting(config, key, value);
    if (exact_flag) config.exact = true;
  } catch (const Error& e) {
    err << "xld: " << e.what() << '\n';
    return kUsage;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return commands[i].fn(config, out, err);
  }
  return kUsage;
}

}  // namespace xld::cli
