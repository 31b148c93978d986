#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "laminaplan/frame.hpp"
#include "laminaplan/grading.hpp"
#include "laminaplan/heatmap.hpp"
#include "laminaplan/landmarks.hpp"
#include "laminaplan/phantom.hpp"
#include "laminaplan/pipeline.hpp"
#include "laminaplan/volume.hpp"

namespace laminaplan::json {

using Json = nlohmann::ordered_json;

/// Rounds to 9 significant digits so serialized numbers are short and stable.
double round9(double v);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

/// Parses text; malformed JSON throws Schema with `where` as context.
Json parse(const std::string& text, const std::string& where);
Json read_file(const std::filesystem::path& path);

// Every *_from_json throws Schema naming the offending field path.

Json to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j, const std::string& field);

Json to_json(const LandmarkSet& lm);
LandmarkSet landmarks_from_json(const Json& j);

Json to_json(const std::vector<CutPlane>& planes);
std::vector<CutPlane> planes_from_json(const Json& j);

Json to_json(const Frame& f);
Frame frame_from_json(const Json& j);

Json to_json(const std::vector<GradeResult>& grades);
std::vector<GradeResult> grades_from_json(const Json& j);

Json to_json(const PlanReport& r);
PlanReport report_from_json(const Json& j);

Json to_json(const BoundingBox& b);
BoundingBox box_from_json(const Json& j);

Json to_json(const PhantomParams& p);
/// Missing fields keep their defaults.
PhantomParams phantom_params_from_json(const Json& j);

Json to_json(const PipelineConfig& c);
/// Missing fields keep their defaults; unknown fields are rejected.
PipelineConfig config_from_json(const Json& j);

/// Per-landmark errors plus mean and sample standard deviation.
Json metrics_to_json(const std::vector<std::string>& labels, const LocalizationReport& r);

} // namespace laminaplan::json
