#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "laminaplan/error.hpp"
#include "laminaplan/grading.hpp"
#include "laminaplan/phantom.hpp"
#include "support.hpp"

using namespace laminaplan;

namespace {

PhantomParams small_params(std::uint64_t seed) {
    PhantomParams p = sample_phantom_params(seed, {72, 128, 128});
    return p;
}

} // namespace

TEST_SUITE("phantom") {

TEST_CASE("generation is deterministic") {
    PhantomParams p = small_params(3);
    p.texture_hu = 25.0;
    const Phantom a = generate_phantom(p), b = generate_phantom(p);
    CHECK(a.volume == b.volume);
    CHECK(a.landmarks.points == b.landmarks.points);
    CHECK(sample_phantom_params(3).body_height == p.body_height);
}

TEST_CASE("different seeds differ") {
    CHECK(sample_phantom_params(1).body_height != sample_phantom_params(2).body_height);
    PhantomParams p;
    p.texture_hu = 25.0;
    p.seed = 1;
    const Volume a = generate_phantom(p).volume;
    p.seed = 2;
    CHECK_FALSE(generate_phantom(p).volume == a);
}

TEST_CASE("symmetric anatomy mirrors the pedicle landmarks") {
    PhantomParams p; // no tilt, no skew, identity pose
    p.rotation_deg = {7, -4, 11};
    p.translation_mm = {1, -2, 3};
    const LandmarkSet w = phantom_landmarks(p);
    const Frame f = fit_frame(w);
    const Vec3 c = f.to_frame(w[Landmark::C]), d = f.to_frame(w[Landmark::D]);
    const Vec3 e = f.to_frame(w[Landmark::E]), fp = f.to_frame(w[Landmark::F]);
    CHECK(std::abs(c.y + fp.y) <= 1e-6);
    CHECK(std::abs(c.x - fp.x) <= 1e-6);
    CHECK(std::abs(c.z - fp.z) <= 1e-6);
    CHECK(std::abs(d.y + e.y) <= 1e-6);
    CHECK(std::abs(d.x - e.x) <= 1e-6);
    CHECK(std::abs(d.z - e.z) <= 1e-6);
}

TEST_CASE("rasterized anatomy matches the parametric shapes") {
    PhantomParams p;
    const Phantom ph = generate_phantom(p);
    const auto value = [&](const Vec3& local) {
        const VoxelCoord v = ph.volume.world_to_voxel(phantom_local_to_world(p, local));
        return ph.volume.at(std::lround(v.z), std::lround(v.y), std::lround(v.x));
    };
    const double axis = p.pedicle_medial_offset + p.pedicle_radius;
    CHECK(value({0, -p.body_ap_half, 0}) == 400.0f);                                      // body centre
    CHECK(value({axis, p.pedicle_length / 2, p.pedicle_superior_offset}) == 400.0f);      // left pedicle axis
    CHECK(value({-axis, p.pedicle_length / 2, p.pedicle_superior_offset}) == 400.0f);     // right pedicle axis
    CHECK(value({0, p.pedicle_length / 2, p.pedicle_superior_offset}) == -100.0f);        // spinal canal
    CHECK(value({0, -p.body_ap_half, p.body_height / 2 + 3}) == -100.0f);                 // above the endplate
    CHECK(ph.volume.at(0, 0, 0) == -1000.0f);                                             // corner outside the body cylinder

    const LandmarkSet local = phantom_local_landmarks(p);
    CHECK(local[Landmark::B] == Vec3{0, 0, 0});
    CHECK(local[Landmark::A].y == -2.0 * p.body_ap_half);
    CHECK(local[Landmark::C].x == doctest::Approx(p.pedicle_medial_offset));
    CHECK(local[Landmark::D].z == doctest::Approx(p.pedicle_superior_offset - p.pedicle_radius));
    CHECK(local[Landmark::G].z == doctest::Approx(-p.body_height / 2));
}

TEST_CASE("local and world coordinates round-trip") {
    const PhantomParams p = small_params(9);
    const Vec3 q{3.5, -7.25, 11.0};
    CHECK(testsupport::max_abs_diff(phantom_world_to_local(p, phantom_local_to_world(p, q)), q) <= 1e-12);
}

TEST_CASE("volumes span the intensity window") {
    const Phantom ph = generate_phantom(small_params(4));
    const auto [lo, hi] = std::minmax_element(ph.volume.voxels().begin(), ph.volume.voxels().end());
    CHECK(*lo < -200.0f);
    CHECK(*hi > 200.0f);
    const Volume w = apply_window(ph.volume);
    const auto [wl, wh] = std::minmax_element(w.voxels().begin(), w.voxels().end());
    CHECK(*wl == 0.0f);
    CHECK(*wh > 0.5f);
}

TEST_CASE("sampled anatomy keeps the endplate below the pedicles and grades A") {
    for (std::uint64_t s = 0; s < 500; ++s) {
        const PhantomParams p = sample_phantom_params(s);
        CHECK(p.pedicle_medial_offset * (1 - std::abs(p.lr_skew)) >= 6.0);
        CHECK(p.pedicle_medial_offset * (1 + std::abs(p.lr_skew)) <= 14.0);
        const LandmarkSet lm = phantom_landmarks(p);
        const FrameConstruction fc = construct_frame(lm);
        const double x_j = fc.frame.to_frame((fc.d_proj + fc.e_proj) * 0.5).x;
        CHECK(fc.frame.to_frame(lm[Landmark::G]).x < x_j);
        for (const CutPlane& pl : plan_planes(lm, PlanMode::Partial)) CHECK(grade_plane(pl, lm).grade == Grade::A);
    }
}

TEST_CASE("landmarks outside the grid are rejected") {
    PhantomParams p;
    p.translation_mm = {200, 0, 0};
    try {
        phantom_landmarks(p);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParamsOutOfBounds);
    }
}

TEST_CASE("parameter validation names the field") {
    const auto field_of = [](PhantomParams p) {
        try {
            p.validate();
        } catch (const Error& e) {
            return e.context();
        }
        return std::string("none");
    };
    PhantomParams p;
    CHECK(field_of(p) == "none");
    p.pedicle_radius = 0;
    CHECK(field_of(p) == "pedicle_radius");
    p = {};
    p.dims = {15, 128, 128};
    CHECK(field_of(p) == "dims");
    p = {};
    p.bone_hu = -200;
    CHECK(field_of(p) == "bone_hu");
    p = {};
    p.soft_tissue_hu = std::nan("");
    CHECK(field_of(p) == "bone_hu");
}

TEST_CASE("zero noise and zero jitter are identities") {
    const Phantom ph = generate_phantom(small_params(5));
    CHECK(add_noise(ph.volume, 0.0, 3) == ph.volume);
    CHECK(jitter_landmarks(ph.landmarks, 0.0, 3).points == ph.landmarks.points);
    CHECK_FALSE(add_noise(ph.volume, 10.0, 3) == ph.volume);
    CHECK(add_noise(ph.volume, 10.0, 3) == add_noise(ph.volume, 10.0, 3));
    CHECK_FALSE(jitter_landmarks(ph.landmarks, 1.0, 3).points == jitter_landmarks(ph.landmarks, 1.0, 4).points);
    CHECK_THROWS_AS(add_noise(ph.volume, -1.0, 3), Error);
}

TEST_CASE("jitter offsets follow the chi distribution with three degrees of freedom") {
    const double sigma = 0.65;
    // analytic mean of |N(0, s^2 I3)|
    const double analytic = sigma * 2.0 * std::sqrt(2.0 / std::numbers::pi);

    // independent Monte-Carlo oracle with the standard library generator
    std::mt19937_64 rng(77);
    std::normal_distribution<double> n(0.0, sigma);
    double mc = 0.0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
        const double x = n(rng), y = n(rng), z = n(rng);
        mc += std::sqrt(x * x + y * y + z * z);
    }
    mc /= draws;
    CHECK(std::abs(mc - analytic) <= 0.01 * analytic);

    LandmarkSet zero;
    double sum = 0.0;
    int count = 0;
    for (std::uint64_t s = 0; s < 1429; ++s) { // 10003 points
        const LandmarkSet j = jitter_landmarks(zero, sigma, s);
        for (const Vec3& p : j.points) {
            sum += norm(p);
            ++count;
        }
    }
    CHECK(std::abs(sum / count - analytic) <= 0.10 * analytic);
}

}
