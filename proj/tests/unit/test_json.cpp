#include <doctest.h>

#include <cmath>

#include "laminaplan/error.hpp"
#include "laminaplan/json_io.hpp"

using namespace laminaplan;
using json::Json;

namespace {

std::string schema_field(const auto& f) {
    try {
        f();
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Schema);
        return e.context();
    }
    FAIL("expected a schema error");
    return {};
}

LandmarkSet sample_landmarks() {
    LandmarkSet lm;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) lm.points[i] = {0.125 * i, -3.5 + i, 1e-3 * i};
    return lm;
}

} // namespace

TEST_SUITE("json") {

TEST_CASE("nine significant digits") {
    CHECK(json::round9(1.0 / 3.0) == 0.333333333);
    CHECK(json::round9(123456789.987) == 123456790.0);
    CHECK(json::round9(0.0) == 0.0);
    CHECK(json::round9(-0.0) == 0.0);
    CHECK(json::dump(Json(json::round9(2.0 / 3.0))) == "0.666666667\n");
}

TEST_CASE("landmarks round-trip and reject bad documents") {
    const LandmarkSet lm = sample_landmarks();
    const Json j = json::to_json(lm);
    CHECK(j.begin().key() == "A");
    CHECK(json::landmarks_from_json(j).points == lm.points);

    Json missing = j;
    missing.erase("E");
    CHECK(schema_field([&] { json::landmarks_from_json(missing); }) == "E");
    Json short_point = j;
    short_point["C"] = {1, 2};
    CHECK(schema_field([&] { json::landmarks_from_json(short_point); }) == "C");
    Json text = j;
    text["G"][1] = "x";
    CHECK(schema_field([&] { json::landmarks_from_json(text); }) == "G[1]");
    Json extra = j;
    extra["H"] = {0, 0, 0};
    CHECK(schema_field([&] { json::landmarks_from_json(extra); }) == "H");
}

TEST_CASE("planes and frames round-trip") {
    const std::vector<CutPlane> planes{{PlaneName::LeftLongitudinal, {-7.5, 0, 0}, {-1, 0, 0}, 1},
                                       {PlaneName::Transverse, {0, 0.4, -7.2}, {0, 0, 1}, -1}};
    const std::vector<CutPlane> back = json::planes_from_json(json::to_json(planes));
    REQUIRE(back.size() == 2);
    CHECK(back[1].name == PlaneName::Transverse);
    CHECK(back[1].point == Vec3{0, 0.4, -7.2});
    CHECK(back[0].resect_side == 1);

    Json bad = json::to_json(planes);
    bad[1]["resect_side"] = 0;
    CHECK(schema_field([&] { json::planes_from_json(bad); }) == "[1].resect_side");
    bad = json::to_json(planes);
    bad[0]["name"] = "diagonal";
    CHECK(schema_field([&] { json::planes_from_json(bad); }) == "[0].name");

    const Frame f{{1, 2, 3}, {0, 0, 1}, {-1, 0, 0}, {0, -1, 0}};
    const Frame g = json::frame_from_json(json::to_json(f));
    CHECK(g.origin == f.origin);
    CHECK(g.y_axis == f.y_axis);
}

TEST_CASE("grades round-trip with missing ratios as null") {
    const std::vector<GradeResult> grades{{PlaneName::RightLongitudinal, Grade::B, 0.5, "middle_third"},
                                          {PlaneName::LeftLongitudinal, Grade::C, std::nan(""), "not_perpendicular"}};
    const Json j = json::to_json(grades);
    CHECK(j[1]["r_or_s"].is_null());
    const auto back = json::grades_from_json(j);
    CHECK(back[0].grade == Grade::B);
    CHECK(back[0].ratio == 0.5);
    CHECK(std::isnan(back[1].ratio));
    CHECK(back[1].reason == "not_perpendicular");
    Json bad = j;
    bad[0]["grade"] = "E";
    CHECK(schema_field([&] { json::grades_from_json(bad); }) == "[0].grade");
}

TEST_CASE("report round-trip and consistency checks") {
    std::vector<std::pair<PlaneKind, Grade>> g(640, {PlaneKind::Longitudinal, Grade::A});
    g.resize(960, {PlaneKind::Transverse, Grade::B});
    const PlanReport r = aggregate(g);
    const Json j = json::to_json(r);
    CHECK(j["longitudinal_cutting_plane"]["A"]["count"] == 640);
    CHECK(j["transverse_cutting_plane"]["B"]["percent"] == 100.0);
    CHECK(json::report_from_json(j) == r);

    Json bad = j;
    bad["transverse_cutting_plane"]["total"] = 321;
    CHECK(schema_field([&] { json::report_from_json(bad); }) == "transverse_cutting_plane.total");
    bad = j;
    bad["longitudinal_cutting_plane"]["A"]["percent"] = 99.0;
    CHECK(schema_field([&] { json::report_from_json(bad); }) == "longitudinal_cutting_plane.A.percent");
}

TEST_CASE("bounding boxes") {
    const BoundingBox b{{1, 2, 3}, {4, 5, 6}};
    CHECK(json::box_from_json(json::to_json(b)) == b);
    CHECK(schema_field([] { json::box_from_json(Json{{"lo", {0, 0}}, {"hi", {1, 1, 1}}}); }) == "lo");
    CHECK(schema_field([] { json::box_from_json(Json{{"lo", {0, 0, 0}}, {"hi", {1, 1.5, 1}}}); }) == "hi[1]");
}

TEST_CASE("phantom params keep defaults and round-trip") {
    const PhantomParams d = json::phantom_params_from_json(Json::object());
    CHECK(d.body_height == PhantomParams{}.body_height);
    PhantomParams p = sample_phantom_params(12);
    const PhantomParams back = json::phantom_params_from_json(json::to_json(p));
    CHECK(back.seed == 12);
    CHECK(back.dims == p.dims);
    CHECK(back.body_height == doctest::Approx(p.body_height).epsilon(1e-8));
    CHECK(schema_field([] { json::phantom_params_from_json(Json{{"pedicle_length", "long"}}); }) == "pedicle_length");
    CHECK(schema_field([] { json::phantom_params_from_json(Json{{"colour", 1}}); }) == "colour");
}

TEST_CASE("pipeline config defaults and validation") {
    const PipelineConfig c = json::config_from_json(Json::object());
    CHECK(c.w_min == -200.0);
    CHECK(c.w_max == 600.0);
    CHECK(c.target_dims == Dims3{72, 128, 128});
    CHECK(c.sigma == 3.0);
    CHECK(c.tau_deg == 5.0);
    CHECK(c.mode == PlanMode::Partial);
    const PipelineConfig r = json::config_from_json(json::to_json(c));
    CHECK(r.target_dims == c.target_dims);

    CHECK(schema_field([] { json::config_from_json(Json{{"w_min", 700}}); }) == "w_min");
    CHECK(schema_field([] { json::config_from_json(Json{{"sigma", 0}}); }) == "sigma");
    CHECK(schema_field([] { json::config_from_json(Json{{"mode", "some"}}); }) == "mode");
    CHECK(schema_field([] { json::config_from_json(Json{{"window", 1}}); }) == "window");
}

TEST_CASE("malformed text") {
    CHECK(schema_field([] { json::parse("{\"A\": [1, 2", "lm.json"); }) == "lm.json");
}

}
