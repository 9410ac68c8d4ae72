#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regsamp/population.hpp"
#include "regsamp/random.hpp"
#include "regsamp/samplers.hpp"
#include "regsamp/stats.hpp"

namespace regsamp {

/// Standard normal quantile Phi^{-1}(p), 0 < p < 1.
///
/// Acklam's rational approximation (relative error < 1.15e-9) followed by one
/// Halley step against std::erfc, which brings the result to near machine
/// precision. normal_quantile(0.975) = 1.959963984540054.
double normal_quantile(double p);

/// Two-sided critical value z_{alpha/2} for confidence `level` = 1 - alpha.
double z_critical(double level);

enum class IntervalKind { kNormal, kStudentT };

struct Estimate {
  Eigen::Index config = 0;
  Eigen::Index n = 0;
  double mean = 0.0;
  std::optional<double> std;         // divisor n-1; absent for n == 1
  double level = 0.95;
  std::optional<double> half_width;  // margin of error; absent for n == 1
  std::optional<double> relative_me;
};

/// Mean, std and margin of error z*s/sqrt(n) of the drawn regions. The
/// Student-t variant is available but never the default.
Estimate point_estimate(const RegionPool& pool, const SampleDraw& draw, Eigen::Index config, double level = 0.95,
                        IntervalKind kind = IntervalKind::kNormal);

/// Same computation over a plain vector of values.
template <typename Derived>
Estimate estimate_from_values(const Eigen::DenseBase<Derived>& values, double level = 0.95,
                              IntervalKind kind = IntervalKind::kNormal);

/// Margin of error for given summary statistics.
double margin_of_error(double std, Eigen::Index n, double level = 0.95, IntervalKind kind = IntervalKind::kNormal);

/// Smallest n with z*s/(sqrt(n)*mean) <= target_relative_me, i.e.
/// ceil((z*s/(target*mean))^2), at least 1.
std::int64_t required_sample_size(double mean, double std, double target_relative_me, double level = 0.95);

struct EmpiricalCI {
  SchemeSpec scheme;  // seed field carries the master seed
  Eigen::Index config = 0;
  std::int64_t trials = 0;
  double level = 0.95;
  double center = 0.0;  // median of sampled means
  double lower = 0.0;
  double upper = 0.0;
  double half_width = 0.0;
  double relative_half_width = 0.0;  // half_width / pool true mean
};

constexpr std::int64_t kMinEmpiricalTrials = 100;

/// Sampled means of `trials` independent draws; trial t uses the scheme with
/// seed derive_seed(master_seed, purpose, t). Order is by trial index
/// regardless of `threads`.
std::vector<double> sampled_means(const RegionPool& pool, const SchemeSpec& scheme, Eigen::Index config,
                                  std::int64_t trials, std::uint64_t master_seed, unsigned threads = 1);

/// Equal-tailed central percentile interval of sampled means.
EmpiricalCI empirical_ci(const RegionPool& pool, const SchemeSpec& scheme, Eigen::Index config, std::int64_t trials,
                         double level, std::uint64_t master_seed, unsigned threads = 1);

/// Percentile interval over an existing set of sampled means.
EmpiricalCI empirical_ci_from_means(std::vector<double> means, double truth, double level);

/// |estimate - truth| / truth, truth > 0.
double relative_error(double estimated_mean, double true_mean);

/// Seed purpose used for a scheme's per-trial derived seeds.
SeedPurpose purpose_for(const SchemeSpec& scheme);

// ---------------------------------------------------------------------------

template <typename Derived>
Estimate estimate_from_values(const Eigen::DenseBase<Derived>& values, double level, IntervalKind kind) {
  if (values.size() == 0) throw ValidationError("estimate needs at least one value");
  Estimate e;
  e.n = values.size();
  e.level = level;
  e.mean = mean(values);
  e.std = sample_std(values);
  if (e.std) {
    e.half_width = margin_of_error(*e.std, e.n, level, kind);
    e.relative_me = *e.half_width / e.mean;
  }
  return e;
}

}  // namespace regsamp
