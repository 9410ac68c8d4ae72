#include "regsamp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "regsamp/errors.hpp"
#include "regsamp/estimators.hpp"
#include "regsamp/experiments.hpp"
#include "regsamp/json_io.hpp"
#include "regsamp/subsampling.hpp"

namespace regsamp::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open `" + path + "` for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading `" + path + "`");
  return ss.str();
}

Json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("`" + path + "` is not valid JSON: " + e.what());
  }
}

RegionPool read_pool(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pool CSV `" + path + "`");
  try {
    return load_pool_csv(in, fs::path(path).stem().string());
  } catch (const ValidationError& e) {
    throw ValidationError("pool CSV `" + path + "`: " + e.what());
  }
}

// Writes via a sibling temp file and rename, so readers never see a partial file.
void write_output(const std::string& path, const std::string& content, bool force) {
  const fs::path target(path);
  if (fs::exists(target) && !force) {
    throw ValidationError("output `" + path + "` already exists; pass --force to overwrite");
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open `" + tmp.string() + "` for writing");
    os << content;
    os.flush();
    if (!os) throw IoError("failed writing `" + tmp.string() + "`");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move output into place at `" + path + "`: " + ec.message());
  }
}

void emit(std::ostream& out, const std::string& path, const std::string& content, bool force) {
  if (path.empty()) {
    out << content;
  } else {
    write_output(path, content, force);
  }
}

std::vector<Eigen::Index> parse_index_list(const std::string& text, const std::string& flag) {
  std::vector<Eigen::Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<Eigen::Index>(v));
    } catch (const std::exception&) {
      throw ValidationError(flag + ": `" + item + "` is not a non-negative integer; use e.g. " + flag + " 0,1,2");
    }
  }
  if (out.empty()) throw ValidationError(flag + " needs at least one config index");
  return out;
}

struct SchemeFlags {
  Eigen::Index srs_n = 0;
  std::vector<Eigen::Index> rss;  // M K
  Eigen::Index rank_config = 0;
};

void add_scheme_flags(CLI::App* cmd, SchemeFlags& flags) {
  auto* srs = cmd->add_option("--srs", flags.srs_n, "Simple random sampling with sample size N")->check(CLI::PositiveNumber);
  auto* rss = cmd->add_option("--rss", flags.rss, "Ranked set sampling with M cycles and set size K")
                  ->expected(2)
                  ->type_name("M K");
  srs->excludes(rss);
  cmd->add_option("--rank-config", flags.rank_config, "Config index used to rank RSS sets")->capture_default_str();
}

SchemeSpec scheme_from_flags(const SchemeFlags& flags, std::uint64_t seed) {
  if (!flags.rss.empty()) {
    if (flags.rss[0] < 1 || flags.rss[1] < 1) throw ValidationError("--rss M K: both must be positive");
    return RssSpec{flags.rss[0], flags.rss[1], flags.rank_config, seed};
  }
  if (flags.srs_n > 0) return SrsSpec{flags.srs_n, seed};
  throw ValidationError("choose a sampling scheme with --srs N or --rss M K");
}

Json pool_meta(const RegionPool& pool) {
  return {{"app", pool.app_label()},
          {"regions", pool.region_count()},
          {"configs", pool.config_labels()},
          {"instructions_per_region", pool.instructions_per_region()}};
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Select representative simulation regions by simple random, ranked set and repeated subsampling."};
  app.name("regsamp");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  bool force = false;
  std::uint64_t seed = 0;
  std::string out_path;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic region pool CSV from a JSON spec");
  std::string spec_path;
  gen->add_option("--spec", spec_path, "Synthetic spec JSON")->required();
  gen->add_option("--seed", seed, "Master seed")->required();
  gen->add_option("--out", out_path, "Output CSV (stdout if omitted)");
  gen->add_flag("--force", force, "Overwrite an existing output file");

  // summary
  auto* summary = app.add_subcommand("summary", "Per-config mean, std and sample size needed for a target margin");
  std::string pool_path;
  double target_me = 0.03;
  double level = 0.95;
  summary->add_option("--pool", pool_path, "Pool CSV")->required();
  summary->add_option("--target-me", target_me, "Target relative margin of error")->capture_default_str();
  summary->add_option("--level", level, "Confidence level")->capture_default_str();
  summary->add_option("--out", out_path, "Output CSV (stdout if omitted)");
  summary->add_flag("--force", force, "Overwrite an existing output file");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw one SRS or RSS sample and write it as JSON");
  SchemeFlags sample_flags;
  sample->add_option("--pool", pool_path, "Pool CSV")->required();
  add_scheme_flags(sample, sample_flags);
  sample->add_option("--seed", seed, "Seed for this draw")->required();
  sample->add_option("--out", out_path, "Output JSON (stdout if omitted)");
  sample->add_flag("--force", force, "Overwrite an existing output file");

  // select
  auto* select = app.add_subcommand("select", "Repeated subsampling: pick the best of T candidate samples");
  SchemeFlags select_flags;
  std::int64_t trials = kDefaultCandidateTrials;
  std::string criterion_text = "baseline";
  std::string train_text = "0";
  unsigned threads = 1;
  select->add_option("--pool", pool_path, "Pool CSV")->required();
  add_scheme_flags(select, select_flags);
  select->add_option("--trials", trials, "Number of candidate subsamples")->capture_default_str();
  select->add_option("--criterion", criterion_text, "Selection criterion")
      ->check(CLI::IsMember({"baseline", "chebyshev", "correlation"}))
      ->capture_default_str();
  select->add_option("--train-configs", train_text,
                     "Comma-separated training config indices (baseline uses the first)")
      ->capture_default_str();
  select->add_option("--seed", seed, "Master seed")->required();
  select->add_option("--threads", threads, "Worker threads (results do not depend on it)")->capture_default_str();
  select->add_option("--out", out_path, "Output JSON (stdout if omitted)");
  select->add_flag("--force", force, "Overwrite an existing output file");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a named experiment and write CSV tables plus a JSON report");
  std::string exp_name;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<unsigned> threads_override;
  experiment->add_option("name", exp_name, "fig1 | fig6 | fig7 | fig8 | fig10 | fig12")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  experiment->add_option("--config", config_path, "Experiment config JSON")->required();
  experiment->add_option("--seed", seed_override, "Override the config's master_seed");
  experiment->add_option("--threads", threads_override, "Worker threads (results do not depend on it)");
  experiment->add_option("--out-dir", out_dir, "Directory for <name>.csv and <name>.json")->required();
  experiment->add_flag("--force", force, "Overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen) {
      const auto spec = synthetic_spec_from_json(read_json(spec_path));
      const auto pool = generate_synthetic(spec, seed);
      std::ostringstream csv;
      write_pool_csv(csv, pool);
      emit(out, out_path, csv.str(), force);
    } else if (*summary) {
      const auto pool = read_pool(pool_path);
      const auto s = pool_summary(pool);
      Table t{"summary", {"config", "label", "regions", "mean", "std", "relative_std", "required_n"}, {}};
      for (Eigen::Index c = 0; c < pool.config_count(); ++c) {
        const auto& cs = s.configs[static_cast<std::size_t>(c)];
        const std::string label = pool.config_labels()[static_cast<std::size_t>(c)];
        if (cs.true_std) {
          t.add_row({std::int64_t{c}, label, std::int64_t{cs.count}, cs.true_mean, *cs.true_std,
                     *cs.true_std / cs.true_mean, required_sample_size(cs.true_mean, *cs.true_std, target_me, level)});
        } else {
          t.add_row({std::int64_t{c}, label, std::int64_t{cs.count}, cs.true_mean, std::string(), std::string(),
                     std::string()});
        }
      }
      std::ostringstream csv;
      write_csv(csv, t, {"target_relative_me=" + format_double(target_me), "level=" + format_double(level)});
      emit(out, out_path, csv.str(), force);
    } else if (*sample) {
      const auto pool = read_pool(pool_path);
      const auto scheme = scheme_from_flags(sample_flags, seed);
      const auto d = draw(pool, scheme);
      Json j = {{"tool", std::string("regsamp ") + kToolVersion}, {"seed", seed}, {"pool", pool_meta(pool)},
                {"draw", to_json(d)}};
      emit(out, out_path, j.dump(2) + "\n", force);
    } else if (*select) {
      const auto pool = read_pool(pool_path);
      const auto scheme = scheme_from_flags(select_flags, 0);
      const auto train = parse_index_list(train_text, "--train-configs");
      for (const auto c : train) pool.check_config(c);
      SelectionCriterion criterion;
      if (criterion_text == "baseline") {
        criterion = BaselineMean{train.front()};
      } else if (criterion_text == "chebyshev") {
        criterion = ChebyshevRelative{train};
      } else {
        criterion = CorrelationMax{train};
      }
      const auto candidates = generate_candidates(pool, scheme, trials, seed, threads);
      const auto report = select_subsample(pool, candidates, criterion);
      Json j = {{"tool", std::string("regsamp ") + kToolVersion},
                {"seed", seed},
                {"trials", trials},
                {"pool", pool_meta(pool)},
                {"scheme", to_json(scheme)},
                {"report", to_json(report, pool)}};
      emit(out, out_path, j.dump(2) + "\n", force);
    } else if (*experiment) {
      Json cfg_json = read_json(config_path);
      if (seed_override && cfg_json.is_object()) cfg_json["master_seed"] = *seed_override;
      auto cfg = ExperimentConfig::from_json(cfg_json);
      if (threads_override) cfg.threads = *threads_override;
      // Relative CSV paths in the config resolve against the config's directory.
      for (auto& p : cfg.pools) {
        if (p.csv_path && fs::path(*p.csv_path).is_relative()) {
          p.csv_path = (fs::path(config_path).parent_path() / *p.csv_path).string();
        }
      }
      const auto tables = run_experiment(exp_name, cfg);
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create output directory `" + out_dir + "`: " + ec.message());
      const auto header = provenance_header(cfg, exp_name);
      Json report = {{"tool", std::string("regsamp ") + kToolVersion},
                     {"experiment", exp_name},
                     {"provenance", header},
                     {"config", cfg.to_json()},
                     {"tables", Json::array()}};
      auto stem_of = [&](std::size_t i) { return i == 0 ? exp_name : exp_name + "_" + tables[i].name; };
      if (!force) {
        for (std::size_t i = 0; i <= tables.size(); ++i) {
          const fs::path p = fs::path(out_dir) / (i < tables.size() ? stem_of(i) + ".csv" : exp_name + ".json");
          if (fs::exists(p)) throw ValidationError("output `" + p.string() + "` already exists; pass --force to overwrite");
        }
      }
      for (std::size_t i = 0; i < tables.size(); ++i) {
        std::ostringstream csv;
        write_csv(csv, tables[i], header);
        write_output((fs::path(out_dir) / (stem_of(i) + ".csv")).string(), csv.str(), force);
        report["tables"].push_back(to_json(tables[i]));
      }
      write_output((fs::path(out_dir) / (exp_name + ".json")).string(), report.dump(2) + "\n", force);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace regsamp::cli
