#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skycast/metrics.hpp"
#include "skycast/scenario.hpp"

namespace skycast {

inline constexpr std::string_view kToolVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownFigure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<int> int_range(int lo, int hi);

/// One sweep: the cartesian product of scenarios, vehicle counts, frame
/// rates, and seeds, all sharing the physical configuration. Defaults cover
/// the full study grid.
struct RunConfig {
  std::vector<ScenarioKind> scenarios = {ScenarioKind::MFF, ScenarioKind::BFF,
                                         ScenarioKind::BFA, ScenarioKind::BAO};
  std::vector<int> vehicles = int_range(4, 21);
  std::vector<double> fps = {15.0, 30.0};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double sim_time_s = 15.0;
  double warmup_s = 0.5;
  LinkModel link;
  SlotConfig slot;
  std::uint64_t buffer_bytes = 10'000'000;  // per bearer, each direction
  SourceProfile profile;
  double processing_delay_s = 0.0;
  double dl_pipeline_s = 0.000375;
  std::string trace_file;  // empty selects the built-in frame-size series
  std::string out_path = "results.csv";
  int jobs = 0;  // 0 means all hardware threads
};

struct SweepProvenance {
  std::uint64_t config_hash = 0;
  std::string tool_version;
  std::string timestamp;  // ISO 8601 UTC; lives here, never in the CSV
};

/// Records come back in canonical order: scenario, then n, fps, seed, in the
/// order each list appears in the config, regardless of how many workers ran
/// the cells.
struct SweepResult {
  std::vector<MetricRecord> records;
  SweepProvenance provenance;
};

/// Throws ConfigError when a sweep axis is empty or a physical parameter is
/// out of range.
void validate(const RunConfig& cfg);

/// Hash over the semantic configuration (everything that can change a
/// record), excluding out_path and jobs.
std::uint64_t config_hash(const RunConfig& cfg);

/// Canned sweeps behind the study plots: fig3a, fig3b, and fig3c share the
/// full grid; fig4 narrows to the frame-and-annotation relay at 30 FPS.
/// Throws UnknownFigure.
RunConfig figure_recipe(std::string_view name);

/// Runs every cell, in parallel up to cfg.jobs, and returns the records in
/// canonical order. Throws ConfigError via validate; propagates the first
/// cell failure.
SweepResult run_sweep(const RunConfig& cfg);

/// Serializes records in their stored order. Throws IoError.
void write_csv(const SweepResult& result, const std::string& path);

/// Writes <csv_path>.meta.json with the provenance block. Throws IoError.
void write_provenance(const SweepResult& result, const std::string& csv_path);

/// Strict JSON config loader: unknown keys are ConfigError, so typos fail
/// loudly. Missing keys keep their defaults.
RunConfig load_config_json(const std::string& path);

/// List syntax shared by the CLI and config files: comma-separated items,
/// where an integer item may be a range "lo..hi" (inclusive).
std::vector<int> parse_int_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::vector<ScenarioKind> parse_scenario_list(const std::string& text);

}  // namespace skycast
