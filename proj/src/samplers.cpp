#include "regsamp/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "regsamp/errors.hpp"
#include "regsamp/random.hpp"
#include "regsamp/stats.hpp"

namespace regsamp {

namespace {

// First `count` entries of a Fisher-Yates shuffle of [0, population).
std::vector<RegionIndex> draw_without_replacement(Eigen::Index population, Eigen::Index count,
                                                  std::uint64_t seed) {
  std::vector<RegionIndex> perm(static_cast<std::size_t>(population));
  std::iota(perm.begin(), perm.end(), RegionIndex{0});
  SplitMix64 rng(seed);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(population - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  perm.resize(static_cast<std::size_t>(count));
  return perm;
}

void check_rss_shape(const RssSpec& spec) {
  if (spec.cycles < 1) throw ValidationError("RSS: cycles M must be at least 1");
  if (spec.set_size < 1) throw ValidationError("RSS: set size K must be at least 1");
}

// Largest K with M*K^2 <= R.
Eigen::Index max_feasible_set_size(Eigen::Index region_count, Eigen::Index cycles) {
  auto k = static_cast<Eigen::Index>(std::sqrt(static_cast<double>(region_count) / static_cast<double>(cycles)));
  while (k > 0 && cycles * k * k > region_count) --k;
  while (cycles * (k + 1) * (k + 1) <= region_count) ++k;
  return k;
}

}  // namespace

Eigen::Index sample_size(const SchemeSpec& scheme) {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, SrsSpec>) {
          return s.n;
        } else {
          return s.sample_size();
        }
      },
      scheme);
}

SchemeSpec with_seed(SchemeSpec scheme, std::uint64_t seed) {
  std::visit([seed](auto& s) { s.seed = seed; }, scheme);
  return scheme;
}

void check_feasible(const RegionPool& pool, const SchemeSpec& scheme) {
  if (const auto* srs = std::get_if<SrsSpec>(&scheme)) {
    if (srs->n < 1) throw ValidationError("SRS: sample size n must be at least 1");
    if (srs->n > pool.region_count()) {
      throw ValidationError("SRS: sample size n=" + std::to_string(srs->n) + " exceeds region count R=" +
                            std::to_string(pool.region_count()));
    }
    return;
  }
  const auto& rss = std::get<RssSpec>(scheme);
  check_rss_shape(rss);
  pool.check_config(rss.ranking_config);
  if (rss.units_required() > pool.region_count()) {
    throw ValidationError("RSS: M*K^2=" + std::to_string(rss.units_required()) + " exceeds region count R=" +
                          std::to_string(pool.region_count()) + "; largest feasible K for M=" +
                          std::to_string(rss.cycles) + " is " +
                          std::to_string(max_feasible_set_size(pool.region_count(), rss.cycles)));
  }
}

SampleDraw draw_srs(const RegionPool& pool, const SrsSpec& spec) {
  check_feasible(pool, spec);
  SampleDraw out;
  out.region_indices = draw_without_replacement(pool.region_count(), spec.n, spec.seed);
  out.scheme = spec;
  return out;
}

std::vector<std::vector<RegionIndex>> form_rss_sets(Eigen::Index region_count, const RssSpec& spec) {
  check_rss_shape(spec);
  if (spec.units_required() > region_count) {
    throw ValidationError("RSS: M*K^2=" + std::to_string(spec.units_required()) + " exceeds region count R=" +
                          std::to_string(region_count) + "; largest feasible K for M=" +
                          std::to_string(spec.cycles) + " is " +
                          std::to_string(max_feasible_set_size(region_count, spec.cycles)));
  }
  const auto units = draw_without_replacement(region_count, spec.units_required(), spec.seed);
  std::vector<std::vector<RegionIndex>> sets;
  sets.reserve(static_cast<std::size_t>(spec.cycles * spec.set_size));
  for (auto it = units.begin(); it != units.end(); it += spec.set_size) {
    sets.emplace_back(it, it + spec.set_size);
  }
  return sets;
}

SampleDraw rss_select(const std::vector<std::vector<RankedUnit>>& sets, const RssSpec& spec) {
  check_rss_shape(spec);
  const Eigen::Index k = spec.set_size;
  if (static_cast<Eigen::Index>(sets.size()) != spec.cycles * k) {
    throw ValidationError("RSS select: expected " + std::to_string(spec.cycles * k) + " sets, got " +
                          std::to_string(sets.size()));
  }
  SampleDraw out;
  out.scheme = spec;
  out.region_indices.reserve(sets.size());
  out.sets.reserve(sets.size());
  out.selected_rank.reserve(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s) {
    if (static_cast<Eigen::Index>(sets[s].size()) != k) {
      throw ValidationError("RSS select: set " + std::to_string(s) + " has " + std::to_string(sets[s].size()) +
                            " units, expected K=" + std::to_string(k));
    }
    std::vector<RankedUnit> ordered = sets[s];
    for (const auto& u : ordered) {
      if (!std::isfinite(u.ranking_value)) {
        throw ValidationError("RSS select: non-finite ranking value in set " + std::to_string(s));
      }
    }
    std::sort(ordered.begin(), ordered.end(), [](const RankedUnit& a, const RankedUnit& b) {
      return a.ranking_value != b.ranking_value ? a.ranking_value < b.ranking_value : a.region < b.region;
    });
    const auto rank = static_cast<Eigen::Index>(s) % k;
    out.region_indices.push_back(ordered[static_cast<std::size_t>(rank)].region);
    out.selected_rank.push_back(rank);
    std::vector<RegionIndex> members;
    members.reserve(sets[s].size());
    for (const auto& u : sets[s]) members.push_back(u.region);
    out.sets.push_back(std::move(members));
  }
  return out;
}

SampleDraw draw_rss(const RegionPool& pool, const RssSpec& spec) {
  check_feasible(pool, spec);
  const auto sets = form_rss_sets(pool.region_count(), spec);
  const auto ranking = pool.values().col(spec.ranking_config);
  std::vector<std::vector<RankedUnit>> ranked;
  ranked.reserve(sets.size());
  for (const auto& set : sets) {
    std::vector<RankedUnit> units;
    units.reserve(set.size());
    for (const auto r : set) units.push_back({r, ranking(r)});
    ranked.push_back(std::move(units));
  }
  return rss_select(ranked, spec);
}

SampleDraw draw(const RegionPool& pool, const SchemeSpec& scheme) {
  return std::visit(
      [&pool](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, SrsSpec>) {
          return draw_srs(pool, s);
        } else {
          return draw_rss(pool, s);
        }
      },
      scheme);
}

std::vector<RankPoint> ranking_accuracy(const SampleDraw& draw, const RegionPool& pool, Eigen::Index eval_config) {
  if (!draw.is_rss() || draw.sets.size() != draw.region_indices.size()) {
    throw ValidationError("ranking accuracy needs an RSS draw with its sets retained");
  }
  const auto eval = pool.column(eval_config);
  const auto& spec = std::get<RssSpec>(draw.scheme);
  std::vector<RankPoint> out;
  out.reserve(draw.sets.size());
  for (std::size_t s = 0; s < draw.sets.size(); ++s) {
    const RegionIndex chosen = draw.region_indices[s];
    const double v = eval(chosen);
    Eigen::Index rank = 0;
    for (const auto r : draw.sets[s]) {
      if (r == chosen) continue;
      if (eval(r) < v || (eval(r) == v && r < chosen)) ++rank;
    }
    out.push_back({static_cast<Eigen::Index>(s) % spec.set_size, rank});
  }
  return out;
}

double sample_mean(const RegionPool& pool, const SampleDraw& draw, Eigen::Index config) {
  pool.check_config(config);
  if (draw.region_indices.empty()) throw ValidationError("sample mean of an empty draw");
  return mean(pool.values()(draw.region_indices, config));
}

}  // namespace regsamp
