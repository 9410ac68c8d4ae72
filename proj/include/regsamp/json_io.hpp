#pragma once

#include <json.hpp>

#include "regsamp/estimators.hpp"
#include "regsamp/population.hpp"
#include "regsamp/samplers.hpp"
#include "regsamp/subsampling.hpp"

namespace regsamp {

using Json = nlohmann::json;

Json to_json(const SchemeSpec& scheme);
SchemeSpec scheme_from_json(const Json& j);

/// {"scheme": "srs"|"rss", <spec fields>, "region_indices": [...], "sets": [...]}
Json to_json(const SampleDraw& draw);
SampleDraw draw_from_json(const Json& j);

Json to_json(const SubsampleReport& report, const RegionPool& pool);
Json to_json(const Estimate& estimate);
Json to_json(const EmpiricalCI& ci);

Json to_json(const SyntheticSpec& spec);
/// Missing keys fall back to default_synthetic_spec(). `coupling` may be a
/// number or an array.
SyntheticSpec synthetic_spec_from_json(const Json& j);

}  // namespace regsamp
