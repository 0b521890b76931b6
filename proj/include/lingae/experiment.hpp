/*
 * Copyright 2026 The lingae Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LINGAE_EXPERIMENT_HPP_
#define LINGAE_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lingae/data.hpp"
#include "lingae/eval.hpp"
#include "lingae/models.hpp"

namespace lingae {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable naming the directory relative dataset paths
/// resolve against.
inline constexpr const char* kDataDirEnv = "LINGAE_DATA_DIR";

enum class Task { kLinkPrediction, kClustering };

std::string to_string(Task task);
Task parse_task(const std::string& text);

/// Flat key-value configuration. Keys and defaults are listed in
/// config_keys(); values are kept as text until `build_experiment_config`.
using ConfigMap = std::map<std::string, std::string>;

/// Known keys with their default values ("" means unset).
const ConfigMap& config_keys();

/// Reads `key = value` lines; `#` starts a comment. Unknown keys throw.
ConfigMap parse_config_text(const std::string& text);
ConfigMap read_config_file(const std::filesystem::path& path);

/// Applies `--key value` pairs on top of `base`.
ConfigMap apply_overrides(ConfigMap base, const std::vector<std::string>& args);

struct ExperimentConfig {
  std::variant<DatasetDescriptor, SbmConfig> dataset;
  Task task = Task::kLinkPrediction;
  ModelSpec model = ModelSpec::linear(false);
  int epochs = 200;
  double learning_rate = 0.01;
  int repetitions = 100;
  std::uint64_t master_seed = 0;
  SplitFractions split;
  /// k for clustering; 0 uses the number of ground-truth classes.
  int clusters = 0;
  /// Row label in rendered tables and the key matched by reference files.
  std::string label;
  std::optional<std::filesystem::path> output_path;

  std::string dataset_name() const;
  void validate() const;
};

/// Learning rates used per dataset when none is configured.
double default_learning_rate(const std::string& dataset_name, const ModelSpec& spec);

/// Typed config from a key-value map. Relative dataset paths resolve
/// against $LINGAE_DATA_DIR when set, else against `base_dir`.
ExperimentConfig build_experiment_config(const ConfigMap& values,
                                         const std::filesystem::path& base_dir = {});

/// Canonical key-value form of a typed config (echoed into reports).
ConfigMap describe_config(const ExperimentConfig& cfg);

/// Seed of repetition r: a fixed function of (master_seed, r) only.
std::uint64_t repetition_seed(std::uint64_t master_seed, int repetition);

struct RepetitionResult {
  int index = 0;
  std::uint64_t seed = 0;
  /// Metric name -> value in percent.
  std::map<std::string, double> metrics;
  double wall_clock_seconds = 0.0;
};

struct RunReport {
  std::string label;
  ConfigMap config;
  std::vector<RepetitionResult> repetitions;
  std::map<std::string, MetricSummary> summaries;
  std::string software_version = kVersion;
  std::string timestamp;

  /// Recomputes `summaries` from the per-repetition metrics.
  void summarize();
};

/// Raised when a repetition fails; carries what is needed to replay it.
class RepetitionError : public std::runtime_error {
 public:
  RepetitionError(int repetition, std::uint64_t seed, const std::string& what);
  int repetition() const { return repetition_; }
  std::uint64_t seed() const { return seed_; }

 private:
  int repetition_;
  std::uint64_t seed_;
};

/// Metrics of a single repetition on an already loaded graph.
RepetitionResult run_repetition(const ExperimentConfig& cfg, const Graph& graph, int repetition);

/// Loads the data once, runs every repetition (up to `jobs` at a time) and
/// aggregates. Results do not depend on `jobs`.
RunReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// Same, on a graph the caller already holds.
RunReport run_experiment(const ExperimentConfig& cfg, const Graph& graph, int jobs = 1);

enum class ReportFormat { kJson, kCsv, kTable };
ReportFormat parse_report_format(const std::string& text);

std::string render_report(const RunReport& report, ReportFormat format);
RunReport report_from_json(const std::string& text);

/// One expected value: |observed mean - mean| <= tolerance passes.
struct ReferenceRow {
  std::string label;
  std::string metric;
  double mean = 0.0;
  double tolerance = 0.0;
};

/// Whitespace-separated `label metric mean tolerance` lines, `#` comments.
std::vector<ReferenceRow> parse_reference(const std::string& text);

struct Verdict {
  ReferenceRow reference;
  double observed = 0.0;
  bool pass = false;
};

/// Checks each reference row against the report with the same label; rows
/// for labels absent from `reports` are ignored. Throws when a matched
/// report lacks the metric or no row matches any report.
std::vector<Verdict> compare_against_reference(const std::vector<RunReport>& reports,
                                               const std::vector<ReferenceRow>& reference);

}  // namespace lingae

#endif  // LINGAE_EXPERIMENT_HPP_
