#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "regsamp/json_io.hpp"
#include "regsamp/population.hpp"
#include "regsamp/samplers.hpp"
#include "regsamp/subsampling.hpp"

namespace regsamp {

inline constexpr const char* kToolVersion = "0.1.0";

using Cell = std::variant<std::int64_t, double, std::string>;

/// Plain result table. CSV output uses shortest round-trip doubles and LF.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

void write_csv(std::ostream& out, const Table& table, const std::vector<std::string>& header_lines = {});
Json to_json(const Table& table);

/// Where a pool comes from: a CSV file or a synthetic spec.
struct PoolSource {
  std::string label;
  std::optional<std::string> csv_path;
  std::optional<SyntheticSpec> synthetic;
};

struct ExperimentConfig {
  std::vector<PoolSource> pools;  // empty -> one default synthetic pool
  Eigen::Index sample_size = 30;
  std::int64_t trials = 1000;
  std::vector<Eigen::Index> rss_cycles = {1, 2, 3};
  Eigen::Index baseline_config = 0;               // ranking and baseline-selection config
  std::optional<Eigen::Index> target_config;      // defaults to the last config
  std::vector<Eigen::Index> train_configs = {0, 1, 2};
  std::uint64_t master_seed = 0;
  double level = 0.95;
  unsigned threads = 1;
  int histogram_bins = 30;

  /// Canonical JSON (sorted keys); excludes `threads`, which never affects
  /// results.
  Json to_json() const;
  static ExperimentConfig from_json(const Json& j);
  /// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
  std::string hash() const;
};

/// Pools the config refers to; synthetic pool p uses seed
/// mix64(master_seed + p).
std::vector<RegionPool> materialize_pools(const ExperimentConfig& cfg);

/// Comment lines written above every CSV: tool version, experiment, seed,
/// config hash, pool provenance.
std::vector<std::string> provenance_header(const ExperimentConfig& cfg, const std::string& experiment);

/// (app, config, mean, std) per pool and config.
Table exp_std_vs_mean(const std::vector<RegionPool>& pools);

struct SamplingDistribution {
  Table means;      // scheme, trial, mean
  Table histogram;  // scheme, bin, lower, upper, count
};

/// T sampled means per scheme (SRS and RSS for each feasible M); RSS ranks on
/// the baseline config while means are taken on the target config.
SamplingDistribution exp_sampling_distribution(const RegionPool& pool, const ExperimentConfig& cfg);

/// Relative half-widths: SRS analytical, SRS empirical, RSS for each M.
Table exp_ci_comparison(const RegionPool& pool, const ExperimentConfig& cfg);

/// (eval config, set position, true rank) for one RSS M=1 draw.
Table exp_ranking_accuracy(const RegionPool& pool, const ExperimentConfig& cfg);

/// Relative error per config for SRS/RSS sampled once (candidate 0) and
/// repeated (baseline-mean winner).
Table exp_error_comparison(const std::vector<RegionPool>& pools, const ExperimentConfig& cfg);

/// Test-config relative errors for each selection criterion and scheme.
Table exp_criteria_comparison(const std::vector<RegionPool>& pools, const ExperimentConfig& cfg);

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// Runs one named experiment, returning its tables (first is primary).
std::vector<Table> run_experiment(const std::string& name, const ExperimentConfig& cfg);

}  // namespace regsamp
