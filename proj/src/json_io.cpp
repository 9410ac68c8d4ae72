#include "regsamp/json_io.hpp"

#include "regsamp/errors.hpp"

namespace regsamp {

Json to_json(const SchemeSpec& scheme) {
  if (const auto* srs = std::get_if<SrsSpec>(&scheme)) {
    return {{"scheme", "srs"}, {"n", srs->n}, {"seed", srs->seed}};
  }
  const auto& rss = std::get<RssSpec>(scheme);
  return {{"scheme", "rss"},
          {"cycles", rss.cycles},
          {"set_size", rss.set_size},
          {"ranking_config", rss.ranking_config},
          {"seed", rss.seed}};
}

SchemeSpec scheme_from_json(const Json& j) {
  try {
    const auto kind = j.at("scheme").get<std::string>();
    if (kind == "srs") return SrsSpec{j.at("n").get<Eigen::Index>(), j.value("seed", std::uint64_t{0})};
    if (kind == "rss") {
      return RssSpec{j.at("cycles").get<Eigen::Index>(), j.at("set_size").get<Eigen::Index>(),
                     j.value("ranking_config", Eigen::Index{0}), j.value("seed", std::uint64_t{0})};
    }
    throw ValidationError("unknown scheme `" + kind + "`; expected srs or rss");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scheme JSON: ") + e.what());
  }
}

Json to_json(const SampleDraw& draw) {
  Json j = to_json(draw.scheme);
  j["sample_size"] = draw.region_indices.size();
  j["region_indices"] = draw.region_indices;
  if (draw.is_rss()) {
    j["sets"] = draw.sets;
    j["selected_rank"] = draw.selected_rank;
  }
  return j;
}

SampleDraw draw_from_json(const Json& j) {
  SampleDraw d;
  d.scheme = scheme_from_json(j);
  try {
    d.region_indices = j.at("region_indices").get<std::vector<RegionIndex>>();
    if (j.contains("sets")) d.sets = j.at("sets").get<std::vector<std::vector<RegionIndex>>>();
    if (j.contains("selected_rank")) d.selected_rank = j.at("selected_rank").get<std::vector<Eigen::Index>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed draw JSON: ") + e.what());
  }
  return d;
}

namespace {

Json errors_json(const std::vector<ConfigError>& errors, const RegionPool& pool) {
  Json arr = Json::array();
  for (const auto& e : errors) {
    arr.push_back({{"config", e.config},
                   {"label", pool.config_labels()[static_cast<std::size_t>(e.config)]},
                   {"relative_error", e.relative_error}});
  }
  return arr;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const SubsampleReport& report, const RegionPool& pool) {
  return {{"criterion", report.criterion},
          {"criterion_value", report.criterion_value},
          {"winner_index", report.winner_index},
          {"winner", to_json(report.winner)},
          {"training_errors", errors_json(report.training_errors, pool)},
          {"test_errors", errors_json(report.test_errors, pool)},
          {"max_training_error", report.max_training_error()},
          {"max_test_error", report.test_errors.empty() ? Json(nullptr) : Json(report.max_test_error())}};
}

Json to_json(const Estimate& e) {
  return {{"config", e.config},         {"n", e.n},
          {"mean", e.mean},             {"std", optional_json(e.std)},
          {"level", e.level},           {"half_width", optional_json(e.half_width)},
          {"relative_me", optional_json(e.relative_me)}};
}

Json to_json(const EmpiricalCI& ci) {
  return {{"scheme", to_json(ci.scheme)}, {"config", ci.config},
          {"trials", ci.trials},          {"level", ci.level},
          {"center", ci.center},          {"lower", ci.lower},
          {"upper", ci.upper},            {"half_width", ci.half_width},
          {"relative_half_width", ci.relative_half_width}};
}

Json to_json(const SyntheticSpec& spec) {
  return {{"app_label", spec.app_label},
          {"config_labels", spec.config_labels},
          {"config_means", spec.config_means},
          {"std_slope", spec.std_slope},
          {"std_intercept", spec.std_intercept},
          {"coupling", spec.coupling},
          {"region_count", spec.region_count},
          {"floor_fraction", spec.floor_fraction}};
}

SyntheticSpec synthetic_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("synthetic spec must be a JSON object");
  SyntheticSpec spec = default_synthetic_spec();
  try {
    spec.app_label = j.value("app_label", spec.app_label);
    spec.config_labels = j.value("config_labels", spec.config_labels);
    spec.config_means = j.value("config_means", spec.config_means);
    spec.std_slope = j.value("std_slope", spec.std_slope);
    spec.std_intercept = j.value("std_intercept", spec.std_intercept);
    if (j.contains("coupling")) {
      const auto& c = j.at("coupling");
      spec.coupling = c.is_array() ? c.get<std::vector<double>>() : std::vector<double>{c.get<double>()};
    }
    spec.region_count = j.value("region_count", spec.region_count);
    spec.floor_fraction = j.value("floor_fraction", spec.floor_fraction);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace regsamp
