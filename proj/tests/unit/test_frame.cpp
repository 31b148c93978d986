#include <doctest.h>

#include <random>

#include "laminaplan/error.hpp"
#include "laminaplan/frame.hpp"
#include "support.hpp"

using namespace laminaplan;
using testsupport::max_abs_diff;

namespace {

/// Hand-checked fixture: Z = (0,-1,0), Y = (-1,0,0), X = (0,0,1).
LandmarkSet fixture() {
    LandmarkSet lm;
    lm[Landmark::A] = {0, 30, 0};
    lm[Landmark::B] = {0, 0, 0};
    lm[Landmark::C] = {-10, -2, 1};
    lm[Landmark::D] = {-12, -2, -4};
    lm[Landmark::E] = {12, -2, -4};
    lm[Landmark::F] = {10, -2, 1};
    lm[Landmark::G] = {0, 1, -12};
    return lm;
}

const CutPlane& plane(const std::vector<CutPlane>& ps, PlaneName n) {
    for (const auto& p : ps)
        if (p.name == n) return p;
    FAIL("plane missing");
    return ps.front();
}

} // namespace

TEST_SUITE("frame") {

TEST_CASE("projection examples") {
    const Vec3 c = project_onto_plane({-10, -2, 1}, {0, 0, 0}, {0, -1, 0});
    CHECK(max_abs_diff(c, {-10, 0, 1}) <= 1e-12);
    CHECK(project_onto_plane({3, 0, 5}, {0, 0, 0}, {0, 1, 0}) == Vec3{3, 0, 5});
    const Vec3 n = normalized(Vec3{1, 2, 3});
    const Vec3 p = project_onto_plane({7, -4, 2}, {1, 1, 1}, n);
    CHECK(std::abs(dot(p - Vec3{1, 1, 1}, n)) <= 1e-9);
    CHECK_NOTHROW(project_onto_plane({1, 1, 1}, {}, {0, 1.0005, 0}));
    CHECK_THROWS_AS(project_onto_plane({1, 1, 1}, {}, {0, 1.01, 0}), Error);
}

TEST_CASE("worked frame") {
    const Frame f = fit_frame(fixture());
    CHECK(max_abs_diff(f.origin, {0, 0, 0}) <= 1e-9);
    CHECK(max_abs_diff(f.z_axis, {0, -1, 0}) <= 1e-9);
    CHECK(max_abs_diff(f.y_axis, {-1, 0, 0}) <= 1e-9);
    CHECK(max_abs_diff(f.x_axis, {0, 0, 1}) <= 1e-9);
}

TEST_CASE("worked planes") {
    const auto planes = plan_planes(fixture(), PlanMode::Partial);
    REQUIRE(planes.size() == 3);
    const CutPlane& p1 = plane(planes, PlaneName::LeftLongitudinal);
    CHECK(max_abs_diff(p1.point, {-7.5, 0, 0}) <= 1e-9);
    CHECK(max_abs_diff(p1.normal, {-1, 0, 0}) <= 1e-9);
    CHECK(p1.resect_side == 1);
    const CutPlane& p2 = plane(planes, PlaneName::RightLongitudinal);
    CHECK(max_abs_diff(p2.point, {7.5, 0, 0}) <= 1e-9);
    CHECK(p2.resect_side == -1);
    const CutPlane& p3 = plane(planes, PlaneName::Transverse);
    CHECK(max_abs_diff(p3.point, {0, 0.4, -7.2}) <= 1e-9);
    CHECK(max_abs_diff(p3.normal, {0, 0, 1}) <= 1e-9);
    CHECK(p3.resect_side == -1);

    const auto total = plan_planes(fixture(), PlanMode::Total);
    CHECK(total.size() == 2);
}

TEST_CASE("frame coordinates") {
    const Frame f = fit_frame(fixture());
    CHECK(f.to_frame(f.origin) == Vec3{0, 0, 0});
    CHECK(max_abs_diff(f.to_frame(f.origin + f.y_axis * 2.0), {0, 2, 0}) <= 1e-12);
    const Vec3 p{3.3, -8.1, 12.7};
    CHECK(max_abs_diff(f.from_frame(f.to_frame(p)), p) <= 1e-9);
}

TEST_CASE("degenerate inputs") {
    LandmarkSet lm = fixture();
    lm[Landmark::A] = lm[Landmark::B];
    CHECK_THROWS_AS(fit_frame(lm), Error);

    lm = fixture();
    lm[Landmark::E] = {-12, -2, -4};
    lm[Landmark::F] = {-10, -2, 1};
    try {
        fit_frame(lm);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegeneratePedicle);
    }

    // left edge pulled across the midline while the pedicle midpoints still resolve a side
    lm = fixture();
    lm[Landmark::C] = {2, -2, 1};
    try {
        plan_planes(lm, PlanMode::Partial);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Orientation);
    }
}

TEST_CASE("mirror-symmetric anatomy gives symmetric longitudinal cuts") {
    const auto planes = plan_planes(fixture(), PlanMode::Total);
    const Frame f = fit_frame(fixture());
    CHECK(std::abs(f.to_frame(planes[0].point).y + f.to_frame(planes[1].point).y) <= 1e-9);
}

TEST_CASE("orthonormal right-handed frames on random landmarks") {
    std::mt19937_64 rng(21);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Frame f = fit_frame(testsupport::random_landmarks(rng));
        worst = std::max({worst, std::abs(norm(f.x_axis) - 1), std::abs(norm(f.y_axis) - 1), std::abs(norm(f.z_axis) - 1),
                          std::abs(dot(f.x_axis, f.y_axis)), std::abs(dot(f.y_axis, f.z_axis)),
                          std::abs(dot(f.x_axis, f.z_axis)), std::abs(determinant(f.x_axis, f.y_axis, f.z_axis) - 1)});
        for (const auto& p : plan_planes(testsupport::random_landmarks(rng), PlanMode::Partial))
            worst = std::max(worst, std::abs(norm(p.normal) - 1));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("plane normals are perpendicular to the posterior axis") {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 1000; ++i) {
        const LandmarkSet lm = testsupport::random_landmarks(rng);
        const Frame f = fit_frame(lm);
        for (const auto& p : plan_planes(lm, PlanMode::Partial)) CHECK(std::abs(dot(p.normal, f.z_axis)) <= 1e-9);
    }
}

TEST_CASE("rigid motion carries frames and planes") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-100, 100);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const LandmarkSet lm = testsupport::random_landmarks(rng);
        const Mat3 r = testsupport::random_rotation(rng);
        const Vec3 t{u(rng), u(rng), u(rng)};
        LandmarkSet moved;
        for (std::size_t k = 0; k < kLandmarkCount; ++k) moved.points[k] = r * lm.points[k] + t;
        const Frame a = fit_frame(lm), b = fit_frame(moved);
        worst = std::max({worst, max_abs_diff(r * a.x_axis, b.x_axis), max_abs_diff(r * a.y_axis, b.y_axis),
                          max_abs_diff(r * a.z_axis, b.z_axis)});
        const auto pa = plan_planes(lm, PlanMode::Partial), pb = plan_planes(moved, PlanMode::Partial);
        for (std::size_t k = 0; k < pa.size(); ++k)
            worst = std::max({worst, max_abs_diff(r * pa[k].point + t, pb[k].point) / 100.0,
                              max_abs_diff(r * pa[k].normal, pb[k].normal)});
    }
    // point error is relative to the 100 mm working scale
    CHECK(worst <= 1e-9);
}

TEST_CASE("uniform scaling about B scales frame coordinates") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> us(0.2, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const LandmarkSet lm = testsupport::random_landmarks(rng);
        const double s = us(rng);
        const Vec3 b = lm[Landmark::B];
        LandmarkSet scaled;
        for (std::size_t k = 0; k < kLandmarkCount; ++k) scaled.points[k] = b + (lm.points[k] - b) * s;
        const Frame fa = fit_frame(lm), fb = fit_frame(scaled);
        const auto pa = plan_planes(lm, PlanMode::Partial), pb = plan_planes(scaled, PlanMode::Partial);
        for (std::size_t k = 0; k < pa.size(); ++k)
            worst = std::max({worst, max_abs_diff(fa.to_frame(pa[k].point) * s, fb.to_frame(pb[k].point)) / (100.0 * s),
                              max_abs_diff(pa[k].normal, pb[k].normal)});
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("name conversions") {
    CHECK(to_string(PlaneName::LeftLongitudinal) == "left_longitudinal");
    CHECK(plane_name_from_string("transverse") == PlaneName::Transverse);
    CHECK(plan_mode_from_string("total") == PlanMode::Total);
    CHECK_THROWS_AS(plan_mode_from_string("half"), Error);
    CHECK(kind_of(PlaneName::RightLongitudinal) == PlaneKind::Longitudinal);
}

}
