#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "xld/analysis.hpp"
#include "xld/knn.hpp"

namespace xld::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kComputeError = 3 };

struct RunConfig {
  std::filesystem::path records;
  std::filesystem::path vectors;
  std::filesystem::path index;
  std::filesystem::path out = ".";
  CoordinatePair pair{};
  AgencyPool pool = default_pool();
  std::size_t k = kDefaultK;
  std::size_t n = 1000;
  std::uint64_t seed = 42;
  std::size_t degree = kDefaultDegree;
  std::uint64_t build_seed = kDefaultBuildSeed;
  SearchParams search{};
  bool exact = false;
  std::size_t bins = 40;
};

/// Applies one setting by its config-file key (e.g. "pool_size"). Throws
/// Errc::invalid_argument for unknown keys or unparsable values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// "key = value" lines; '#' starts a comment; blank lines ignored.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// XLD_<KEY> variables (e.g. XLD_POOL_SIZE) from `lookup`.
template <typename Lookup>
void apply_env(RunConfig& config, Lookup lookup);

/// Every setting as key/value text, in key order.
std::map<std::string, std::string> settings(const RunConfig& config);

/// Entry point used by main(); returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

// Subcommands, callable directly from tests. Each returns an exit code and
// leaves no outputs behind on failure.
int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_index(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_project(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sample(const RunConfig& config, std::ostream& out, std::ostream& err);

const char* const kSettingKeys[] = {"records", "vectors",    "index",       "out",
                                    "pair",    "pool",       "k",           "n",
                                    "seed",    "degree",     "build_seed",  "pool_size",
                                    "entry_count", "max_evaluations", "exact", "bins"};

template <typename Lookup>
void apply_env(RunConfig& config, Lookup lookup) {
  for (const char* key : kSettingKeys) {
    std::string var = "XLD_";
    for (const char* c = key; *c; ++c) var.push_back(static_cast<char>(*c >= 'a' && *c <= 'z' ? *c - 32 : *c));
    if (const char* value = lookup(var.c_str())) apply_setting(config, key, value);
  }
}

}  // namespace xld::cli
