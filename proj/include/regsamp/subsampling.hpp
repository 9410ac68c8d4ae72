#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "regsamp/population.hpp"
#include "regsamp/samplers.hpp"

namespace regsamp {

constexpr std::int64_t kDefaultCandidateTrials = 1000;

/// T candidate subsamples drawn with the same scheme; candidate t uses seed
/// derive_seed(master_seed, SeedPurpose::kCandidate, t).
struct CandidateSet {
  SchemeSpec scheme;
  std::int64_t trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<SampleDraw> draws;
  bool operator==(const CandidateSet&) const = default;
};

CandidateSet generate_candidates(const RegionPool& pool, const SchemeSpec& scheme, std::int64_t trials,
                                 std::uint64_t master_seed, unsigned threads = 1);

/// Minimise the relative error on one config.
struct BaselineMean {
  Eigen::Index baseline_config = 0;
};
/// Minimise the largest relative error over the training configs.
struct ChebyshevRelative {
  std::vector<Eigen::Index> training_configs;
};
/// Maximise the Pearson correlation between the candidate's per-config
/// means and the true means over the training configs (>= 2 configs).
struct CorrelationMax {
  std::vector<Eigen::Index> training_configs;
};

using SelectionCriterion = std::variant<BaselineMean, ChebyshevRelative, CorrelationMax>;

std::vector<Eigen::Index> training_configs(const SelectionCriterion& criterion);
std::string criterion_name(const SelectionCriterion& criterion);
bool criterion_maximizes(const SelectionCriterion& criterion);
void validate_criterion(const RegionPool& pool, const SelectionCriterion& criterion);

struct ConfigError {
  Eigen::Index config = 0;
  double relative_error = 0.0;
  bool operator==(const ConfigError&) const = default;
};

struct SubsampleReport {
  SampleDraw winner;
  std::int64_t winner_index = 0;
  std::string criterion;
  double criterion_value = 0.0;
  std::vector<ConfigError> training_errors;
  std::vector<ConfigError> test_errors;

  double max_test_error() const;
  double max_training_error() const;
};

/// Per-candidate sample means: rows are candidates, columns configs.
CpiMatrix candidate_means(const RegionPool& pool, const std::vector<SampleDraw>& draws);

/// Criterion value of every candidate given the candidate mean matrix and
/// the true per-config means. For CorrelationMax a candidate whose mean
/// vector has zero variance scores -infinity.
Eigen::VectorXd score_candidates(const CpiMatrix& means, const Eigen::VectorXd& truth,
                                 const SelectionCriterion& criterion);

/// Index of the best score; ties go to the lowest index.
std::int64_t best_candidate(const Eigen::VectorXd& scores, bool maximize);

SubsampleReport select_subsample(const RegionPool& pool, const std::vector<SampleDraw>& candidates,
                                 const SelectionCriterion& criterion);

inline SubsampleReport select_subsample(const RegionPool& pool, const CandidateSet& candidates,
                                        const SelectionCriterion& criterion) {
  return select_subsample(pool, candidates.draws, criterion);
}

std::vector<ConfigError> evaluate_generalization(const RegionPool& pool, const SubsampleReport& report,
                                                 const std::vector<Eigen::Index>& test_configs);

}  // namespace regsamp
