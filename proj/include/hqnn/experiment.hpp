#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hqnn/data.hpp"
#include "hqnn/nn.hpp"
#include "hqnn/train.hpp"

namespace hqnn::experiment {

struct SynthConfig {
  int n_per_class = 100;
  int image_size = 32;
  std::uint64_t seed = 7;
};

// Shared configuration for the train and experiment commands. Exactly one
// data source (data_root or synth) must be set.
struct ExperimentConfig {
  std::optional<std::string> data_root;
  std::optional<SynthConfig> synth;
  int image_size = 128;        // resize target / architecture input size
  std::string preset = "full";  // full | small; ignored when network_json is set
  std::optional<std::string> network_json;  // classical NetworkSpec override

  int rounds = 30;
  int epochs = 20;
  double lr = 0.01;
  int batch_size = 32;
  std::uint64_t base_seed = 1;
  int parallel_rounds = 1;
  std::string output_dir;

  // Only meaningful for the single-run train command.
  std::optional<std::string> architecture;

  void validate() const;
};

// Parses and schema-checks a config document; errors name the offending field.
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

struct MetricRow {
  std::string metric;
  std::optional<double> classical_mean;
  std::optional<double> hybrid_mean;
  std::optional<double> p_value;  // empty when either sample has n < 2 or is absent
  std::string direction;          // hybrid_less | hybrid_greater
};

struct ComparisonReport {
  std::vector<MetricRow> rows;
  std::vector<train::RunResult> classical_runs;
  std::vector<train::RunResult> hybrid_runs;
  std::string config_echo_json;  // empty when rebuilt without a persisted config
};

data::Dataset load_dataset(const ExperimentConfig& cfg);
nn::ArchitecturePair build_architectures(const ExperimentConfig& cfg);

// Single seeded run (seed = base_seed); writes run.json and losses.csv
// to output_dir. Requires cfg.architecture.
train::RunResult run_train_command(const ExperimentConfig& cfg);

// The multi-round comparison: `rounds` runs per architecture with seeds
// base_seed + i, scheduled over up to parallel_rounds threads, aggregated
// with one-tailed Welch tests per metric (losses: hybrid less; AUROC and
// accuracy: hybrid greater). Writes per-round run files, report.json,
// report.csv, and the mean loss-curve CSVs to output_dir.
ComparisonReport run_experiment_command(const ExperimentConfig& cfg);

// Rebuilds the report from persisted run files without retraining; writes
// the same report artifacts back into results_dir.
ComparisonReport run_report_command(const std::string& results_dir);

// Aggregation used by both commands; pure function of the run lists.
ComparisonReport build_report(std::vector<train::RunResult> classical,
                              std::vector<train::RunResult> hybrid,
                              std::string config_echo_json);

std::string report_to_json(const ComparisonReport& report);
std::string report_to_csv(const ComparisonReport& report);
std::string loss_curves_csv(const ComparisonReport& report, bool validation);

}  // namespace hqnn::experiment
