#include "laminaplan/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>

#include "laminaplan/error.hpp"
#include "laminaplan/io.hpp"

namespace laminaplan::json {

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& msg) {
    throw Error(ErrorCode::Schema, field + ": " + msg, field);
}

const Json& member(const Json& j, const std::string& key, const std::string& field) {
    if (!j.is_object()) schema(field, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) schema(field.empty() ? key : field + "." + key, "missing field");
    return *it;
}

std::string join(const std::string& parent, const std::string& key) { return parent.empty() ? key : parent + "." + key; }

double number(const Json& j, const std::string& field) {
    if (!j.is_number()) schema(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) schema(field, "expected a finite number");
    return v;
}

std::int64_t integer(const Json& j, const std::string& field) {
    if (!j.is_number_integer()) schema(field, "expected an integer");
    return j.get<std::int64_t>();
}

std::string text(const Json& j, const std::string& field) {
    if (!j.is_string()) schema(field, "expected a string");
    return j.get<std::string>();
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& field) {
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) schema(join(field, key), "unknown field");
}

/// Re-raises enum parsing failures as schema errors at `field`.
template <typename F>
auto parse_enum(F&& f, const std::string& field) {
    try {
        return f();
    } catch (const Error& e) {
        schema(field, e.what());
    }
}

Json ratio_json(double r) { return std::isfinite(r) ? Json(round9(r)) : Json(nullptr); }

Json summary_json(const KindSummary& k) {
    Json j = Json::object();
    for (std::size_t g = 0; g < 3; ++g)
        j[std::string(to_string(static_cast<Grade>(g)))] = {{"count", k.counts[g]}, {"percent", round9(k.percent[g])}};
    j["total"] = k.total;
    return j;
}

KindSummary summary_from_json(const Json& j, const std::string& field) {
    KindSummary k;
    std::int64_t sum = 0;
    for (std::size_t g = 0; g < 3; ++g) {
        const std::string key(to_string(static_cast<Grade>(g)));
        const Json& cell = member(j, key, field);
        const std::string f = join(field, key);
        k.counts[g] = integer(member(cell, "count", f), f + ".count");
        if (k.counts[g] < 0) schema(f + ".count", "must be >= 0");
        sum += k.counts[g];
    }
    k.total = integer(member(j, "total", field), join(field, "total"));
    if (k.total != sum) schema(join(field, "total"), "does not equal the sum of the counts");
    for (std::size_t g = 0; g < 3; ++g) {
        k.percent[g] = percent_half_up(k.counts[g], k.total);
        const std::string f = join(field, std::string(to_string(static_cast<Grade>(g)))) + ".percent";
        const double given = number(member(j[std::string(to_string(static_cast<Grade>(g)))], "percent", f), f);
        if (std::abs(given - k.percent[g]) > 1e-9) schema(f, "does not match the count");
    }
    return k;
}

constexpr const char* kLongKey = "longitudinal_cutting_plane";
constexpr const char* kTransKey = "transverse_cutting_plane";

} // namespace

double round9(double v) {
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Schema, "malformed JSON: " + std::string(e.what()), where);
    }
}

Json read_file(const std::filesystem::path& path) {
    const io::Bytes bytes = io::read_file(path);
    return parse(std::string(bytes.begin(), bytes.end()), path.string());
}

Json to_json(const Vec3& v) { return Json::array({round9(v.x), round9(v.y), round9(v.z)}); }

Vec3 vec3_from_json(const Json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) schema(field, "expected [x, y, z]");
    return {number(j[0], field + "[0]"), number(j[1], field + "[1]"), number(j[2], field + "[2]")};
}

Json to_json(const LandmarkSet& lm) {
    Json j = Json::object();
    for (std::size_t i = 0; i < kLandmarkCount; ++i) j[std::string(kLandmarkNames[i])] = to_json(lm.points[i]);
    return j;
}

LandmarkSet landmarks_from_json(const Json& j) {
    if (!j.is_object()) schema("", "landmarks must be an object keyed A..G");
    std::set<std::string> known;
    LandmarkSet lm;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const std::string key(kLandmarkNames[i]);
        known.insert(key);
        lm.points[i] = vec3_from_json(member(j, key, ""), key);
    }
    reject_unknown(j, known, "");
    return lm;
}

Json to_json(const std::vector<CutPlane>& planes) {
    Json j = Json::array();
    for (const CutPlane& p : planes)
        j.push_back({{"name", std::string(to_string(p.name))},
                     {"point", to_json(p.point)},
                     {"normal", to_json(p.normal)},
                     {"resect_side", p.resect_side}});
    return j;
}

std::vector<CutPlane> planes_from_json(const Json& j) {
    if (!j.is_array()) schema("", "planes must be a list");
    std::vector<CutPlane> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string f = "[" + std::to_string(i) + "]";
        const Json& e = j[i];
        CutPlane p;
        const std::string name = text(member(e, "name", f), f + ".name");
        p.name = parse_enum([&] { return plane_name_from_string(name); }, f + ".name");
        p.point = vec3_from_json(member(e, "point", f), f + ".point");
        p.normal = vec3_from_json(member(e, "normal", f), f + ".normal");
        if (!(norm(p.normal) > 0.0)) schema(f + ".normal", "must be non-zero");
        const std::int64_t side = integer(member(e, "resect_side", f), f + ".resect_side");
        if (side != 1 && side != -1) schema(f + ".resect_side", "must be +1 or -1");
        p.resect_side = static_cast<int>(side);
        reject_unknown(e, {"name", "point", "normal", "resect_side"}, f);
        out.push_back(p);
    }
    return out;
}

Json to_json(const Frame& f) {
    return {{"origin", to_json(f.origin)}, {"X", to_json(f.x_axis)}, {"Y", to_json(f.y_axis)}, {"Z", to_json(f.z_axis)}};
}

Frame frame_from_json(const Json& j) {
    Frame f;
    f.origin = vec3_from_json(member(j, "origin", ""), "origin");
    f.x_axis = vec3_from_json(member(j, "X", ""), "X");
    f.y_axis = vec3_from_json(member(j, "Y", ""), "Y");
    f.z_axis = vec3_from_json(member(j, "Z", ""), "Z");
    reject_unknown(j, {"origin", "X", "Y", "Z"}, "");
    return f;
}

Json to_json(const std::vector<GradeResult>& grades) {
    Json j = Json::array();
    for (const GradeResult& g : grades)
        j.push_back({{"plane_name", std::string(to_string(g.plane))},
                     {"grade", std::string(to_string(g.grade))},
                     {"r_or_s", ratio_json(g.ratio)},
                     {"reason", g.reason}});
    return j;
}

std::vector<GradeResult> grades_from_json(const Json& j) {
    if (!j.is_array()) schema("", "grades must be a list");
    std::vector<GradeResult> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string f = "[" + std::to_string(i) + "]";
        const Json& e = j[i];
        GradeResult g;
        const std::string name = text(member(e, "plane_name", f), f + ".plane_name");
        g.plane = parse_enum([&] { return plane_name_from_string(name); }, f + ".plane_name");
        const std::string grade = text(member(e, "grade", f), f + ".grade");
        g.grade = parse_enum([&] { return grade_from_string(grade); }, f + ".grade");
        const Json& r = member(e, "r_or_s", f);
        g.ratio = r.is_null() ? std::numeric_limits<double>::quiet_NaN() : number(r, f + ".r_or_s");
        g.reason = text(member(e, "reason", f), f + ".reason");
        reject_unknown(e, {"plane_name", "grade", "r_or_s", "reason"}, f);
        out.push_back(std::move(g));
    }
    return out;
}

Json to_json(const PlanReport& r) { return {{kLongKey, summary_json(r.longitudinal)}, {kTransKey, summary_json(r.transverse)}}; }

PlanReport report_from_json(const Json& j) {
    PlanReport r;
    r.longitudinal = summary_from_json(member(j, kLongKey, ""), kLongKey);
    r.transverse = summary_from_json(member(j, kTransKey, ""), kTransKey);
    reject_unknown(j, {kLongKey, kTransKey}, "");
    return r;
}

Json to_json(const BoundingBox& b) { return {{"lo", {b.lo.z, b.lo.y, b.lo.x}}, {"hi", {b.hi.z, b.hi.y, b.hi.x}}}; }

BoundingBox box_from_json(const Json& j) {
    const auto corner = [&](const char* key) {
        const Json& c = member(j, key, "");
        if (!c.is_array() || c.size() != 3) schema(key, "expected [z, y, x] voxel indices");
        const std::string f(key);
        return VoxelIndex{integer(c[0], f + "[0]"), integer(c[1], f + "[1]"), integer(c[2], f + "[2]")};
    };
    BoundingBox b{corner("lo"), corner("hi")};
    reject_unknown(j, {"lo", "hi"}, "");
    return b;
}

Json to_json(const PhantomParams& p) {
    return {{"body_ap_half", round9(p.body_ap_half)},
            {"body_lateral_half", round9(p.body_lateral_half)},
            {"body_height", round9(p.body_height)},
            {"pedicle_radius", round9(p.pedicle_radius)},
            {"pedicle_length", round9(p.pedicle_length)},
            {"pedicle_medial_offset", round9(p.pedicle_medial_offset)},
            {"pedicle_superior_offset", round9(p.pedicle_superior_offset)},
            {"lamina_thickness", round9(p.lamina_thickness)},
            {"spinous_length", round9(p.spinous_length)},
            {"lateral_tilt_deg", round9(p.lateral_tilt_deg)},
            {"lr_skew", round9(p.lr_skew)},
            {"rotation_deg", to_json(p.rotation_deg)},
            {"translation_mm", to_json(p.translation_mm)},
            {"bone_hu", round9(p.bone_hu)},
            {"soft_tissue_hu", round9(p.soft_tissue_hu)},
            {"air_hu", round9(p.air_hu)},
            {"texture_hu", round9(p.texture_hu)},
            {"dims", {p.dims.nz, p.dims.ny, p.dims.nx}},
            {"spacing", to_json(p.spacing)},
            {"seed", p.seed}};
}

PhantomParams phantom_params_from_json(const Json& j) {
    if (!j.is_object()) schema("", "phantom params must be an object");
    PhantomParams p;
    const std::pair<const char*, double*> scalars[] = {
        {"body_ap_half", &p.body_ap_half},
        {"body_lateral_half", &p.body_lateral_half},
        {"body_height", &p.body_height},
        {"pedicle_radius", &p.pedicle_radius},
        {"pedicle_length", &p.pedicle_length},
        {"pedicle_medial_offset", &p.pedicle_medial_offset},
        {"pedicle_superior_offset", &p.pedicle_superior_offset},
        {"lamina_thickness", &p.lamina_thickness},
        {"spinous_length", &p.spinous_length},
        {"lateral_tilt_deg", &p.lateral_tilt_deg},
        {"lr_skew", &p.lr_skew},
        {"bone_hu", &p.bone_hu},
        {"soft_tissue_hu", &p.soft_tissue_hu},
        {"air_hu", &p.air_hu},
        {"texture_hu", &p.texture_hu},
    };
    std::set<std::string> known{"rotation_deg", "translation_mm", "dims", "spacing", "seed"};
    for (const auto& [key, dst] : scalars) {
        known.insert(key);
        if (j.contains(key)) *dst = number(j[key], key);
    }
    if (j.contains("rotation_deg")) p.rotation_deg = vec3_from_json(j["rotation_deg"], "rotation_deg");
    if (j.contains("translation_mm")) p.translation_mm = vec3_from_json(j["translation_mm"], "translation_mm");
    if (j.contains("spacing")) p.spacing = vec3_from_json(j["spacing"], "spacing");
    if (j.contains("dims")) {
        const Json& d = j["dims"];
        if (!d.is_array() || d.size() != 3) schema("dims", "expected [nz, ny, nx]");
        p.dims = {integer(d[0], "dims[0]"), integer(d[1], "dims[1]"), integer(d[2], "dims[2]")};
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) schema("seed", "expected a non-negative integer");
        p.seed = j["seed"].get<std::uint64_t>();
    }
    reject_unknown(j, known, "");
    return p;
}

Json to_json(const PipelineConfig& c) {
    return {{"w_min", round9(c.w_min)},
            {"w_max", round9(c.w_max)},
            {"target_dims", {c.target_dims.nz, c.target_dims.ny, c.target_dims.nx}},
            {"sigma", round9(c.sigma)},
            {"tau_deg", round9(c.tau_deg)},
            {"mode", std::string(to_string(c.mode))},
            {"seed", c.seed}};
}

PipelineConfig config_from_json(const Json& j) {
    if (!j.is_object()) schema("", "config must be an object");
    PipelineConfig c;
    if (j.contains("w_min")) c.w_min = number(j["w_min"], "w_min");
    if (j.contains("w_max")) c.w_max = number(j["w_max"], "w_max");
    if (j.contains("sigma")) c.sigma = number(j["sigma"], "sigma");
    if (j.contains("tau_deg")) c.tau_deg = number(j["tau_deg"], "tau_deg");
    if (j.contains("target_dims")) {
        const Json& d = j["target_dims"];
        if (!d.is_array() || d.size() != 3) schema("target_dims", "expected [nz, ny, nx]");
        c.target_dims = {integer(d[0], "target_dims[0]"), integer(d[1], "target_dims[1]"), integer(d[2], "target_dims[2]")};
    }
    if (j.contains("mode")) {
        const std::string m = text(j["mode"], "mode");
        c.mode = parse_enum([&] { return plan_mode_from_string(m); }, "mode");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) schema("seed", "expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    reject_unknown(j, {"w_min", "w_max", "target_dims", "sigma", "tau_deg", "mode", "seed"}, "");
    try {
        c.validate();
    } catch (const Error& e) {
        schema(e.context(), e.what());
    }
    return c;
}

Json metrics_to_json(const std::vector<std::string>& labels, const LocalizationReport& r) {
    Json errors = Json::array();
    for (std::size_t i = 0; i < r.errors.size(); ++i)
        errors.push_back({{"label", i < labels.size() ? labels[i] : std::to_string(i)}, {"error_mm", round9(r.errors[i])}});
    return {{"count", r.errors.size()}, {"mean_mm", round9(r.mean)}, {"std_mm", round9(r.std_dev)}, {"errors", errors}};
}

} // namespace laminaplan::json
