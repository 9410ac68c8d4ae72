#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "regsamp/population.hpp"

namespace regsamp {

using RegionIndex = Eigen::Index;

/// Simple random sampling of n regions without replacement.
struct SrsSpec {
  Eigen::Index n = 30;
  std::uint64_t seed = 0;
  bool operator==(const SrsSpec&) const = default;
};

/// Ranked set sampling: M cycles of K sets, K units per set, ranked on
/// `ranking_config`. Sample size M*K from M*K^2 distinct units.
struct RssSpec {
  Eigen::Index cycles = 1;    // M
  Eigen::Index set_size = 30; // K
  Eigen::Index ranking_config = 0;
  std::uint64_t seed = 0;

  Eigen::Index sample_size() const noexcept { return cycles * set_size; }
  Eigen::Index units_required() const noexcept { return cycles * set_size * set_size; }
  bool operator==(const RssSpec&) const = default;
};

using SchemeSpec = std::variant<SrsSpec, RssSpec>;

Eigen::Index sample_size(const SchemeSpec& scheme);
/// Returns a copy of `scheme` with its seed replaced.
SchemeSpec with_seed(SchemeSpec scheme, std::uint64_t seed);
/// Throws ValidationError if the scheme cannot be drawn from `pool`.
void check_feasible(const RegionPool& pool, const SchemeSpec& scheme);

struct SampleDraw {
  std::vector<RegionIndex> region_indices;
  SchemeSpec scheme;
  /// RSS only: the M*K sets in draw order, and for each set the 0-based rank
  /// of the unit taken from it (set m*K+j contributes rank j).
  std::vector<std::vector<RegionIndex>> sets;
  std::vector<Eigen::Index> selected_rank;

  bool is_rss() const noexcept { return std::holds_alternative<RssSpec>(scheme); }
  bool operator==(const SampleDraw&) const = default;
};

/// Uniform without replacement: partial Fisher-Yates over [0, R) driven by
/// SplitMix64(spec.seed).
SampleDraw draw_srs(const RegionPool& pool, const SrsSpec& spec);

/// M*K sets of K indices, all M*K^2 indices distinct. Sets are consecutive
/// chunks of one without-replacement draw of M*K^2 units.
std::vector<std::vector<RegionIndex>> form_rss_sets(Eigen::Index region_count, const RssSpec& spec);

/// One ranked set: region indices paired with their ranking values.
struct RankedUnit {
  RegionIndex region;
  double ranking_value;
};

/// Pure selection step: within set m*K+j take the unit of ascending rank j,
/// ties broken by smaller region index.
SampleDraw rss_select(const std::vector<std::vector<RankedUnit>>& sets, const RssSpec& spec);

SampleDraw draw_rss(const RegionPool& pool, const RssSpec& spec);

SampleDraw draw(const RegionPool& pool, const SchemeSpec& scheme);

struct RankPoint {
  Eigen::Index set_position;  // j
  Eigen::Index true_rank;     // rank of the selected unit under eval config
  bool operator==(const RankPoint&) const = default;
};

/// For each RSS set, the rank (0..K-1) its selected unit has when the set is
/// re-ordered by `eval_config` (ties by region index).
std::vector<RankPoint> ranking_accuracy(const SampleDraw& draw, const RegionPool& pool, Eigen::Index eval_config);

/// Mean of the drawn regions under one config.
double sample_mean(const RegionPool& pool, const SampleDraw& draw, Eigen::Index config);

}  // namespace regsamp
