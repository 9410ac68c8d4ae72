#include "regsamp/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "regsamp/errors.hpp"
#include "regsamp/estimators.hpp"
#include "regsamp/random.hpp"

namespace regsamp {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table `" + name + "`: row width mismatch");
  rows.push_back(std::move(row));
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else {
          return v;
        }
      },
      cell);
}

Json cell_json(const Cell& cell) {
  return std::visit([](const auto& v) { return Json(v); }, cell);
}

std::int64_t as_int(Eigen::Index v) { return static_cast<std::int64_t>(v); }

}  // namespace

void write_csv(std::ostream& out, const Table& table, const std::vector<std::string>& header_lines) {
  std::string buf;
  for (const auto& line : header_lines) buf += "# " + line + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) buf += (i ? "," : "") + table.columns[i];
  buf += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) buf += (i ? "," : "") + format_cell(row[i]);
    buf += '\n';
  }
  out << buf;
}

Json to_json(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (const auto& cell : row) r.push_back(cell_json(cell));
    rows.push_back(std::move(r));
  }
  return {{"name", table.name}, {"columns", table.columns}, {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Config

Json ExperimentConfig::to_json() const {
  Json pool_list = Json::array();
  for (const auto& p : pools) {
    Json j = {{"label", p.label}};
    if (p.csv_path) j["csv"] = *p.csv_path;
    if (p.synthetic) j["synthetic"] = regsamp::to_json(*p.synthetic);
    pool_list.push_back(std::move(j));
  }
  Json j = {{"pools", std::move(pool_list)},
            {"sample_size", sample_size},
            {"trials", trials},
            {"rss_cycles", rss_cycles},
            {"baseline_config", baseline_config},
            {"train_configs", train_configs},
            {"master_seed", master_seed},
            {"level", level},
            {"histogram_bins", histogram_bins}};
  j["target_config"] = target_config ? Json(*target_config) : Json(nullptr);
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (j.contains("pools")) {
      for (const auto& p : j.at("pools")) {
        PoolSource src;
        src.label = p.value("label", std::string("pool") + std::to_string(cfg.pools.size()));
        if (p.contains("csv")) src.csv_path = p.at("csv").get<std::string>();
        if (p.contains("synthetic")) src.synthetic = synthetic_spec_from_json(p.at("synthetic"));
        if (src.csv_path.has_value() == src.synthetic.has_value()) {
          throw ValidationError("pool `" + src.label + "` needs exactly one of `csv` or `synthetic`");
        }
        cfg.pools.push_back(std::move(src));
      }
    }
    cfg.sample_size = j.value("sample_size", cfg.sample_size);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.rss_cycles = j.value("rss_cycles", cfg.rss_cycles);
    cfg.baseline_config = j.value("baseline_config", cfg.baseline_config);
    if (j.contains("target_config") && !j.at("target_config").is_null()) {
      cfg.target_config = j.at("target_config").get<Eigen::Index>();
    }
    cfg.train_configs = j.value("train_configs", cfg.train_configs);
    if (!j.contains("master_seed")) throw ValidationError("experiment config needs `master_seed`");
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    cfg.level = j.value("level", cfg.level);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.histogram_bins = j.value("histogram_bins", cfg.histogram_bins);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed experiment config: ") + e.what());
  }
  if (cfg.sample_size < 2) throw ValidationError("experiment sample_size must be at least 2");
  if (cfg.trials < kMinEmpiricalTrials) {
    throw ValidationError("experiment trials must be at least " + std::to_string(kMinEmpiricalTrials));
  }
  if (cfg.histogram_bins < 1) throw ValidationError("histogram_bins must be positive");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ValidationError("level must lie in (0, 1)");
  for (const auto m : cfg.rss_cycles) {
    if (m < 1) throw ValidationError("rss_cycles entries must be positive");
  }
  return cfg;
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<RegionPool> materialize_pools(const ExperimentConfig& cfg) {
  std::vector<PoolSource> sources = cfg.pools;
  if (sources.empty()) sources.push_back({"synthetic", std::nullopt, default_synthetic_spec()});
  std::vector<RegionPool> pools;
  for (std::size_t p = 0; p < sources.size(); ++p) {
    const auto& src = sources[p];
    if (src.synthetic) {
      SyntheticSpec spec = *src.synthetic;
      if (!src.label.empty()) spec.app_label = src.label;
      pools.push_back(generate_synthetic(spec, mix64(cfg.master_seed + p)));
    } else {
      std::ifstream in(*src.csv_path);
      if (!in) throw IoError("cannot open pool CSV `" + *src.csv_path + "`");
      pools.push_back(load_pool_csv(in, src.label));
    }
  }
  return pools;
}

std::vector<std::string> provenance_header(const ExperimentConfig& cfg, const std::string& experiment) {
  bool any_synthetic = cfg.pools.empty();
  for (const auto& p : cfg.pools) any_synthetic = any_synthetic || p.synthetic.has_value();
  return {
      std::string("tool=regsamp ") + kToolVersion,
      "experiment=" + experiment,
      "master_seed=" + std::to_string(cfg.master_seed),
      "config_hash=" + cfg.hash(),
      any_synthetic ? "pool_source=synthetic stand-in populations (not measured simulator configurations)"
                    : "pool_source=user-supplied CSV",
  };
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

Eigen::Index target_of(const RegionPool& pool, const ExperimentConfig& cfg) {
  const Eigen::Index target = cfg.target_config.value_or(pool.config_count() - 1);
  pool.check_config(target);
  return target;
}

// RSS schemes with total sample size n, one per feasible M dividing n.
std::vector<std::pair<std::string, SchemeSpec>> rss_schemes(const RegionPool& pool, const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, SchemeSpec>> out;
  for (const auto m : cfg.rss_cycles) {
    if (cfg.sample_size % m != 0) continue;
    const RssSpec spec{m, cfg.sample_size / m, cfg.baseline_config, 0};
    if (spec.units_required() > pool.region_count()) continue;
    out.emplace_back("rss_m" + std::to_string(m), spec);
  }
  return out;
}

bool rss_feasible(const RegionPool& pool, const ExperimentConfig& cfg) {
  return cfg.sample_size * cfg.sample_size <= pool.region_count();
}

std::uint64_t scheme_master(const ExperimentConfig& cfg, const SchemeSpec& scheme, std::size_t pool_index) {
  return derive_seed(cfg.master_seed, purpose_for(scheme), pool_index);
}

}  // namespace

Table exp_std_vs_mean(const std::vector<RegionPool>& pools) {
  Table t{"std_vs_mean", {"app", "config", "label", "mean", "std"}, {}};
  for (const auto& pool : pools) {
    const auto summary = pool_summary(pool);
    for (Eigen::Index c = 0; c < pool.config_count(); ++c) {
      const auto& s = summary.configs[static_cast<std::size_t>(c)];
      t.add_row({pool.app_label(), as_int(c), pool.config_labels()[static_cast<std::size_t>(c)], s.true_mean,
                 s.true_std.value_or(std::nan(""))});
    }
  }
  return t;
}

SamplingDistribution exp_sampling_distribution(const RegionPool& pool, const ExperimentConfig& cfg) {
  pool.check_config(cfg.baseline_config);
  const Eigen::Index target = target_of(pool, cfg);
  std::vector<std::pair<std::string, SchemeSpec>> schemes = {{"srs", SrsSpec{cfg.sample_size, 0}}};
  for (auto& s : rss_schemes(pool, cfg)) schemes.push_back(std::move(s));

  SamplingDistribution out{{"sampling_distribution", {"app", "scheme", "config", "trial", "mean"}, {}},
                           {"sampling_histogram", {"app", "scheme", "bin", "lower", "upper", "count"}, {}}};
  std::vector<std::vector<double>> all;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [name, scheme] : schemes) {
    auto means = sampled_means(pool, scheme, target, cfg.trials, scheme_master(cfg, scheme, 0), cfg.threads);
    for (std::size_t t = 0; t < means.size(); ++t) {
      out.means.add_row({pool.app_label(), name, as_int(target), static_cast<std::int64_t>(t), means[t]});
      lo = std::min(lo, means[t]);
      hi = std::max(hi, means[t]);
    }
    all.push_back(std::move(means));
  }
  const int bins = cfg.histogram_bins;
  const double width = (hi - lo) / bins;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (const double m : all[s]) {
      int b = width > 0.0 ? static_cast<int>((m - lo) / width) : 0;
      counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
    }
    for (int b = 0; b < bins; ++b) {
      out.histogram.add_row({pool.app_label(), schemes[s].first, std::int64_t{b}, lo + b * width,
                             b == bins - 1 ? hi : lo + (b + 1) * width, counts[static_cast<std::size_t>(b)]});
    }
  }
  return out;
}

Table exp_ci_comparison(const RegionPool& pool, const ExperimentConfig& cfg) {
  pool.check_config(cfg.baseline_config);
  const Eigen::Index target = target_of(pool, cfg);
  Table t{"ci_comparison", {"app", "scheme", "config", "lower", "upper", "half_width", "relative_half_width"}, {}};
  const auto summary = pool_summary(pool).configs[static_cast<std::size_t>(target)];
  const double me = margin_of_error(summary.true_std.value_or(0.0), cfg.sample_size, cfg.level);
  t.add_row({pool.app_label(), std::string("srs_analytical"), as_int(target), summary.true_mean - me,
             summary.true_mean + me, me, me / summary.true_mean});

  std::vector<std::pair<std::string, SchemeSpec>> schemes = {{"srs_empirical", SrsSpec{cfg.sample_size, 0}}};
  for (auto& s : rss_schemes(pool, cfg)) schemes.push_back(std::move(s));
  for (const auto& [name, scheme] : schemes) {
    const auto ci = empirical_ci(pool, scheme, target, cfg.trials, cfg.level, scheme_master(cfg, scheme, 0), cfg.threads);
    t.add_row({pool.app_label(), name, as_int(target), ci.lower, ci.upper, ci.half_width, ci.relative_half_width});
  }
  return t;
}

Table exp_ranking_accuracy(const RegionPool& pool, const ExperimentConfig& cfg) {
  const RssSpec spec{1, cfg.sample_size, cfg.baseline_config, derive_seed(cfg.master_seed, SeedPurpose::kRss, 0)};
  const auto d = draw_rss(pool, spec);
  Table t{"ranking_accuracy", {"app", "eval_config", "label", "set_position", "true_rank"}, {}};
  for (Eigen::Index c = 0; c < pool.config_count(); ++c) {
    for (const auto& p : ranking_accuracy(d, pool, c)) {
      t.add_row({pool.app_label(), as_int(c), pool.config_labels()[static_cast<std::size_t>(c)],
                 as_int(p.set_position), as_int(p.true_rank)});
    }
  }
  return t;
}

Table exp_error_comparison(const std::vector<RegionPool>& pools, const ExperimentConfig& cfg) {
  Table t{"error_comparison", {"app", "config", "label", "role", "scheme", "relative_error"}, {}};
  for (std::size_t p = 0; p < pools.size(); ++p) {
    const auto& pool = pools[p];
    pool.check_config(cfg.baseline_config);
    std::vector<std::pair<std::string, SchemeSpec>> schemes = {{"srs", SrsSpec{cfg.sample_size, 0}}};
    if (rss_feasible(pool, cfg)) schemes.emplace_back("rss", RssSpec{1, cfg.sample_size, cfg.baseline_config, 0});
    for (const auto& [name, scheme] : schemes) {
      const auto candidates = generate_candidates(pool, scheme, cfg.trials, scheme_master(cfg, scheme, p), cfg.threads);
      const auto report = select_subsample(pool, candidates, BaselineMean{cfg.baseline_config});
      const SampleDraw& once = candidates.draws.front();
      for (Eigen::Index c = 0; c < pool.config_count(); ++c) {
        const std::string label = pool.config_labels()[static_cast<std::size_t>(c)];
        const std::string role = c == cfg.baseline_config ? "baseline" : "test";
        const double truth = true_mean(pool, c);
        t.add_row({pool.app_label(), as_int(c), label, role, name + "_once",
                   relative_error(sample_mean(pool, once, c), truth)});
        t.add_row({pool.app_label(), as_int(c), label, role, name + "_repeated",
                   relative_error(sample_mean(pool, report.winner, c), truth)});
      }
    }
  }
  return t;
}

Table exp_criteria_comparison(const std::vector<RegionPool>& pools, const ExperimentConfig& cfg) {
  Table t{"criteria_comparison", {"app", "test_config", "label", "criterion", "scheme", "relative_error"}, {}};
  for (std::size_t p = 0; p < pools.size(); ++p) {
    const auto& pool = pools[p];
    std::vector<Eigen::Index> train;
    for (const auto c : cfg.train_configs) {
      if (c >= 0 && c < pool.config_count()) train.push_back(c);
    }
    std::vector<Eigen::Index> test;
    for (Eigen::Index c = 0; c < pool.config_count(); ++c) {
      if (std::find(train.begin(), train.end(), c) == train.end()) test.push_back(c);
    }
    if (train.empty() || test.empty()) continue;
    pool.check_config(cfg.baseline_config);

    std::vector<std::pair<std::string, SelectionCriterion>> criteria = {
        {"baseline", BaselineMean{cfg.baseline_config}}, {"chebyshev", ChebyshevRelative{train}}};
    if (train.size() >= 2) criteria.emplace_back("correlation", CorrelationMax{train});

    std::vector<std::pair<std::string, SchemeSpec>> schemes = {{"srs", SrsSpec{cfg.sample_size, 0}}};
    if (rss_feasible(pool, cfg)) schemes.emplace_back("rss", RssSpec{1, cfg.sample_size, cfg.baseline_config, 0});
    for (const auto& [scheme_name, scheme] : schemes) {
      const auto candidates = generate_candidates(pool, scheme, cfg.trials, scheme_master(cfg, scheme, p), cfg.threads);
      for (const auto& [crit_name, criterion] : criteria) {
        std::optional<SubsampleReport> report;
        try {
          report = select_subsample(pool, candidates, criterion);
        } catch (const ValidationError&) {
          // Degenerate correlation input: no rows for this criterion.
          continue;
        }
        for (const auto& e : evaluate_generalization(pool, *report, test)) {
          t.add_row({pool.app_label(), as_int(e.config), pool.config_labels()[static_cast<std::size_t>(e.config)],
                     crit_name, scheme_name, e.relative_error});
        }
      }
    }
  }
  return t;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fig1", "fig6", "fig7", "fig8", "fig10", "fig12"};
  return names;
}

namespace {

void append(Table& into, const Table& from) {
  if (into.columns.empty()) {
    into = from;
    return;
  }
  into.rows.insert(into.rows.end(), from.rows.begin(), from.rows.end());
}

}  // namespace

std::vector<Table> run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  const auto pools = materialize_pools(cfg);
  if (name == "fig1") return {exp_std_vs_mean(pools)};
  if (name == "fig10") return {exp_error_comparison(pools, cfg)};
  if (name == "fig12") return {exp_criteria_comparison(pools, cfg)};
  if (name == "fig6") {
    Table means;
    Table hist;
    for (const auto& pool : pools) {
      const auto d = exp_sampling_distribution(pool, cfg);
      append(means, d.means);
      append(hist, d.histogram);
    }
    return {means, hist};
  }
  if (name == "fig7" || name == "fig8") {
    Table out;
    for (const auto& pool : pools) append(out, name == "fig7" ? exp_ci_comparison(pool, cfg) : exp_ranking_accuracy(pool, cfg));
    return {out};
  }
  std::string known;
  for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown experiment `" + name + "`; expected one of: " + known);
}

}  // namespace regsamp
