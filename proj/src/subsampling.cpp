#include "regsamp/subsampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "regsamp/errors.hpp"
#include "regsamp/estimators.hpp"
#include "regsamp/parallel.hpp"
#include "regsamp/random.hpp"
#include "regsamp/stats.hpp"

namespace regsamp {

CandidateSet generate_candidates(const RegionPool& pool, const SchemeSpec& scheme, std::int64_t trials,
                                 std::uint64_t master_seed, unsigned threads) {
  if (trials < 1) throw ValidationError("candidate set needs at least one trial");
  check_feasible(pool, scheme);
  CandidateSet out;
  out.scheme = scheme;
  out.trials = trials;
  out.master_seed = master_seed;
  out.draws.resize(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](std::int64_t t) {
    out.draws[static_cast<std::size_t>(t)] =
        draw(pool, with_seed(scheme, derive_seed(master_seed, SeedPurpose::kCandidate, static_cast<std::uint64_t>(t))));
  });
  return out;
}

std::vector<Eigen::Index> training_configs(const SelectionCriterion& criterion) {
  return std::visit(
      [](const auto& c) -> std::vector<Eigen::Index> {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, BaselineMean>) {
          return {c.baseline_config};
        } else {
          return c.training_configs;
        }
      },
      criterion);
}

std::string criterion_name(const SelectionCriterion& criterion) {
  switch (criterion.index()) {
    case 0: return "baseline";
    case 1: return "chebyshev";
    default: return "correlation";
  }
}

bool criterion_maximizes(const SelectionCriterion& criterion) {
  return std::holds_alternative<CorrelationMax>(criterion);
}

void validate_criterion(const RegionPool& pool, const SelectionCriterion& criterion) {
  const auto configs = training_configs(criterion);
  if (configs.empty()) throw ValidationError("selection criterion needs at least one training config");
  std::set<Eigen::Index> seen;
  for (const auto c : configs) {
    pool.check_config(c);
    if (!seen.insert(c).second) {
      throw ValidationError("training config " + std::to_string(c) + " listed more than once");
    }
  }
  if (std::holds_alternative<CorrelationMax>(criterion) && configs.size() < 2) {
    throw ValidationError("correlation criterion needs at least two training configs");
  }
}

double SubsampleReport::max_test_error() const {
  double m = 0.0;
  for (const auto& e : test_errors) m = std::max(m, e.relative_error);
  return m;
}

double SubsampleReport::max_training_error() const {
  double m = 0.0;
  for (const auto& e : training_errors) m = std::max(m, e.relative_error);
  return m;
}

CpiMatrix candidate_means(const RegionPool& pool, const std::vector<SampleDraw>& draws) {
  CpiMatrix means(static_cast<Eigen::Index>(draws.size()), pool.config_count());
  for (std::size_t t = 0; t < draws.size(); ++t) {
    const auto& idx = draws[t].region_indices;
    if (idx.empty()) throw ValidationError("candidate " + std::to_string(t) + " is empty");
    for (const auto r : idx) {
      if (r < 0 || r >= pool.region_count()) {
        throw ValidationError("candidate " + std::to_string(t) + " references region " + std::to_string(r) +
                              " outside the pool");
      }
    }
    means.row(static_cast<Eigen::Index>(t)) = pool.values()(idx, Eigen::all).colwise().mean();
  }
  return means;
}

Eigen::VectorXd score_candidates(const CpiMatrix& means, const Eigen::VectorXd& truth,
                                 const SelectionCriterion& criterion) {
  const auto configs = training_configs(criterion);
  const Eigen::Index t_count = means.rows();
  Eigen::VectorXd scores(t_count);

  if (const auto* corr = std::get_if<CorrelationMax>(&criterion)) {
    const Eigen::VectorXd target = truth(corr->training_configs);
    if (!pearson(target, target)) {
      throw ValidationError("correlation criterion: true means over the training configs have zero variance");
    }
    for (Eigen::Index t = 0; t < t_count; ++t) {
      const Eigen::VectorXd cand = means.row(t)(corr->training_configs).transpose();
      scores(t) = pearson(cand, target).value_or(-std::numeric_limits<double>::infinity());
    }
    return scores;
  }

  // Baseline and Chebyshev: largest relative error over the training configs.
  const Eigen::ArrayXd inv_truth = truth(configs).array().inverse();
  for (Eigen::Index t = 0; t < t_count; ++t) {
    const Eigen::ArrayXd rel =
        (means.row(t)(configs).transpose().array() - truth(configs).array()).abs() * inv_truth;
    scores(t) = rel.maxCoeff();
  }
  return scores;
}

std::int64_t best_candidate(const Eigen::VectorXd& scores, bool maximize) {
  if (scores.size() == 0) throw ValidationError("candidate set is empty");
  Eigen::Index best = 0;
  for (Eigen::Index t = 1; t < scores.size(); ++t) {
    if (maximize ? scores(t) > scores(best) : scores(t) < scores(best)) best = t;
  }
  return best;
}

SubsampleReport select_subsample(const RegionPool& pool, const std::vector<SampleDraw>& candidates,
                                 const SelectionCriterion& criterion) {
  if (candidates.empty()) throw ValidationError("candidate set is empty");
  validate_criterion(pool, criterion);
  const Eigen::VectorXd truth = pool.values().colwise().mean().transpose();
  const CpiMatrix means = candidate_means(pool, candidates);
  const Eigen::VectorXd scores = score_candidates(means, truth, criterion);
  const bool maximize = criterion_maximizes(criterion);
  const std::int64_t win = best_candidate(scores, maximize);
  if (maximize && !std::isfinite(scores(win))) {
    throw ValidationError("correlation criterion: every candidate's mean vector has zero variance");
  }

  SubsampleReport report;
  report.winner = candidates[static_cast<std::size_t>(win)];
  report.winner_index = win;
  report.criterion = criterion_name(criterion);
  report.criterion_value = scores(win);
  const auto train = training_configs(criterion);
  const std::set<Eigen::Index> train_set(train.begin(), train.end());
  for (Eigen::Index c = 0; c < pool.config_count(); ++c) {
    const ConfigError err{c, relative_error(means(win, c), truth(c))};
    (train_set.contains(c) ? report.training_errors : report.test_errors).push_back(err);
  }
  return report;
}

std::vector<ConfigError> evaluate_generalization(const RegionPool& pool, const SubsampleReport& report,
                                                 const std::vector<Eigen::Index>& test_configs) {
  std::vector<ConfigError> out;
  out.reserve(test_configs.size());
  for (const auto c : test_configs) {
    pool.check_config(c);
    out.push_back({c, relative_error(sample_mean(pool, report.winner, c), true_mean(pool, c))});
  }
  return out;
}

}  // namespace regsamp
