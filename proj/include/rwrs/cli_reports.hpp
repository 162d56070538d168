#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwrs/error.hpp"
#include "rwrs/lattice_model.hpp"

namespace rwrs {

/// Flat key/value configuration grouped in sections ("section.key").
/// Text form is INI:
///   [experiment]
///   name = lln
///   seed = 7
///   [model]
///   step = (-1,1,2) (1,1,2)
///   [params]
///   n = 1024 4096
struct RunConfig {
  std::map<std::string, std::string> values;

  std::string experiment() const;
  std::uint64_t seed() const;
  unsigned workers() const;
  std::string out_dir() const;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key, std::vector<std::int64_t> fallback) const;

  /// Model from [model] step/scenery, Rademacher defaults.
  ModelConfig model() const;
  /// Observable from "(a,w) (a,w) ..." text.
  Observable observable(const std::string& key, const Observable& fallback) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// "section.key=value"; a bare "key=value" goes to [params].
void apply_override(RunConfig& config, const std::string& assignment);

/// "(v,num,den) ..." gives exact rationals, "(v,p) ..." floating masses.
LatticePmf parse_pmf(const std::string& text);
Observable parse_observable(const std::string& text);

/// Canonical JSON text of the effective configuration (sorted keys).
std::string canonical_config_json(const RunConfig& config);

/// 16 hex digits of FNV-1a over canonical_config_json.
std::string config_hash(const RunConfig& config);

const std::vector<std::string>& experiment_names();

struct CriterionOutcome {
  int id = 0;  // acceptance criterion number, 0 for ad-hoc thresholds
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentArtifacts {
  std::string name;
  std::string json;  // canonical, byte-stable for fixed config + seed
  std::string csv;
  std::vector<CriterionOutcome> criteria;
  double seconds = 0.0;  // wall time, kept out of the JSON
};

/// Runs the configured experiment in memory.
ExperimentArtifacts run_experiment(const RunConfig& config);

/// Writes <dir>/<name>.json and <dir>/<name>.csv via temporary files and
/// rename, so a failed run leaves nothing half-written.
void write_artifacts(const ExperimentArtifacts& artifacts, const std::string& dir);

/// Canonical JSON for one acceptance criterion, consumable by report().
std::string criterion_artifact_json(const CriterionOutcome& outcome, const std::string& payload_json,
                                    std::uint64_t seed);

/// Atomic write of a whole file.
void write_file_atomic(const std::string& path, const std::string& contents);

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> lines;
};

int exit_code_for(ErrorCode code) noexcept;
inline constexpr int kExitReportFail = 10;

/// Parses, applies overrides, runs, writes artifacts. Never throws.
RunOutcome run(const std::string& config_path, const std::vector<std::string>& overrides);
RunOutcome run_text(const std::string& config_text, const std::vector<std::string>& overrides);

struct ReportOutcome {
  bool all_pass = false;
  std::vector<CriterionOutcome> criteria;  // sorted by id then name
  std::string table;
};

/// Merges every artifact JSON in `dir` into one acceptance table.
ReportOutcome report(const std::string& dir);

}  // namespace rwrs
