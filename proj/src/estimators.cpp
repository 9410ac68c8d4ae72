#include "regsamp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "regsamp/errors.hpp"
#include "regsamp/parallel.hpp"

namespace regsamp {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs 0 < p < 1");

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double z_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  return normal_quantile(1.0 - (1.0 - level) / 2.0);
}

namespace {

double critical_value(double level, Eigen::Index n, IntervalKind kind) {
  if (kind == IntervalKind::kNormal) return z_critical(level);
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(dist, 1.0 - (1.0 - level) / 2.0);
}

void check_draw(const RegionPool& pool, const SampleDraw& draw) {
  if (draw.region_indices.empty()) throw ValidationError("draw contains no regions");
  for (const auto r : draw.region_indices) {
    if (r < 0 || r >= pool.region_count()) {
      throw ValidationError("draw references region " + std::to_string(r) + " outside pool of " +
                            std::to_string(pool.region_count()));
    }
  }
}

}  // namespace

double margin_of_error(double std, Eigen::Index n, double level, IntervalKind kind) {
  if (n < 2) throw ValidationError("margin of error needs n >= 2");
  if (!(std >= 0.0)) throw ValidationError("margin of error needs a non-negative std");
  return critical_value(level, n, kind) * std / std::sqrt(static_cast<double>(n));
}

Estimate point_estimate(const RegionPool& pool, const SampleDraw& draw, Eigen::Index config, double level,
                        IntervalKind kind) {
  pool.check_config(config);
  check_draw(pool, draw);
  Estimate e = estimate_from_values(pool.values()(draw.region_indices, config), level, kind);
  e.config = config;
  return e;
}

std::int64_t required_sample_size(double mean, double std, double target_relative_me, double level) {
  if (!(mean > 0.0)) throw ValidationError("required sample size needs a positive mean");
  if (!(std >= 0.0)) throw ValidationError("required sample size needs a non-negative std");
  if (!(target_relative_me > 0.0)) throw ValidationError("target relative margin of error must be positive");
  const double root = z_critical(level) * std / (target_relative_me * mean);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(root * root)));
}

SeedPurpose purpose_for(const SchemeSpec& scheme) {
  return std::holds_alternative<SrsSpec>(scheme) ? SeedPurpose::kSrs : SeedPurpose::kRss;
}

std::vector<double> sampled_means(const RegionPool& pool, const SchemeSpec& scheme, Eigen::Index config,
                                  std::int64_t trials, std::uint64_t master_seed, unsigned threads) {
  pool.check_config(config);
  check_feasible(pool, scheme);
  if (trials < 1) throw ValidationError("trial count must be positive");
  const SeedPurpose purpose = purpose_for(scheme);
  std::vector<double> means(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](std::int64_t t) {
    const auto d = draw(pool, with_seed(scheme, derive_seed(master_seed, purpose, static_cast<std::uint64_t>(t))));
    means[static_cast<std::size_t>(t)] = sample_mean(pool, d, config);
  });
  return means;
}

EmpiricalCI empirical_ci_from_means(std::vector<double> means, double truth, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  if (!(truth > 0.0)) throw ValidationError("empirical CI needs a positive true mean");
  if (static_cast<std::int64_t>(means.size()) < kMinEmpiricalTrials) {
    throw ValidationError("empirical CI needs at least " + std::to_string(kMinEmpiricalTrials) + " trials, got " +
                          std::to_string(means.size()));
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - level;
  EmpiricalCI ci;
  ci.trials = static_cast<std::int64_t>(means.size());
  ci.level = level;
  ci.center = percentile_sorted(means, 0.5);
  ci.lower = percentile_sorted(means, alpha / 2.0);
  ci.upper = percentile_sorted(means, 1.0 - alpha / 2.0);
  ci.half_width = std::max(0.0, (ci.upper - ci.lower) / 2.0);
  ci.relative_half_width = ci.half_width / truth;
  return ci;
}

EmpiricalCI empirical_ci(const RegionPool& pool, const SchemeSpec& scheme, Eigen::Index config, std::int64_t trials,
                         double level, std::uint64_t master_seed, unsigned threads) {
  if (trials < kMinEmpiricalTrials) {
    throw ValidationError("empirical CI needs at least " + std::to_string(kMinEmpiricalTrials) + " trials, got " +
                          std::to_string(trials));
  }
  auto ci = empirical_ci_from_means(sampled_means(pool, scheme, config, trials, master_seed, threads),
                                    true_mean(pool, config), level);
  ci.scheme = with_seed(scheme, master_seed);
  ci.config = config;
  return ci;
}

double relative_error(double estimated_mean, double true_mean) {
  if (!(true_mean > 0.0)) throw ValidationError("relative error needs a positive true mean");
  return std::abs(estimated_mean - true_mean) / true_mean;
}

}  // namespace regsamp
