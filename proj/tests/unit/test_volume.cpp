#include <doctest.h>

#include <algorithm>
#include <random>

#include "laminaplan/error.hpp"
#include "laminaplan/volume.hpp"
#include "support.hpp"

using namespace laminaplan;

namespace {

Volume random_volume(const Dims3& d, std::uint64_t seed, double lo = -1000.0, double hi = 1500.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Geometry g{d, {0.7, 0.9, 1.3}, {-12.5, 3.0, 40.0}};
    std::vector<float> v(static_cast<std::size_t>(d.count()));
    for (float& x : v) x = static_cast<float>(u(rng));
    return Volume(g, std::move(v));
}

ErrorCode code_of(const auto& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Usage;
}

} // namespace

TEST_SUITE("volume") {

TEST_CASE("window boundary values") {
    CHECK(window_value(-200.0, -200.0, 600.0) == 0.0);
    CHECK(window_value(600.0, -200.0, 600.0) == 1.0);
    CHECK(window_value(200.0, -200.0, 600.0) == 0.5);
    CHECK(window_value(-5000.0, -200.0, 600.0) == 0.0);
    CHECK(window_value(5000.0, -200.0, 600.0) == 1.0);
}

TEST_CASE("window keeps geometry and rejects an empty range") {
    const Volume v = random_volume({4, 5, 6}, 1);
    const Volume w = apply_window(v);
    CHECK(w.geometry() == v.geometry());
    CHECK(code_of([&] { apply_window(v, 10.0, 10.0); }) == ErrorCode::InvalidWindow);
    CHECK(code_of([&] { apply_window(v, 20.0, 10.0); }) == ErrorCode::InvalidWindow);
}

TEST_CASE("window is monotone and bounded on random voxels") {
    const Volume v = random_volume({10, 20, 30}, 2, -3000.0, 3000.0);
    const Volume w = apply_window(v, -200.0, 600.0);
    std::vector<std::pair<float, float>> pairs;
    for (std::size_t i = 0; i < v.voxels().size(); ++i) {
        CHECK_UNARY(w.voxels()[i] >= 0.0f);
        CHECK_UNARY(w.voxels()[i] <= 1.0f);
        pairs.emplace_back(v.voxels()[i], w.voxels()[i]);
    }
    std::sort(pairs.begin(), pairs.end());
    bool monotone = true;
    for (std::size_t i = 1; i < pairs.size(); ++i) monotone = monotone && pairs[i].second >= pairs[i - 1].second;
    CHECK(monotone);
}

TEST_CASE("crop to the network size") {
    Geometry g{{100, 200, 200}, {0.5, 0.5, 2.0}, {1.0, 2.0, 3.0}};
    const Volume v(g, 7.0f);
    const Volume c = crop(v, {{10, 20, 20}, {81, 147, 147}});
    CHECK(c.dims() == Dims3{72, 128, 128});
    CHECK(c.geometry().origin.x == doctest::Approx(1.0 + 20 * 0.5));
    CHECK(c.geometry().origin.y == doctest::Approx(2.0 + 20 * 0.5));
    CHECK(c.geometry().origin.z == doctest::Approx(3.0 + 10 * 2.0));
}

TEST_CASE("full crop is the identity and hi must be in range") {
    const Volume v = random_volume({5, 6, 7}, 3);
    CHECK(crop(v, {{0, 0, 0}, {4, 5, 6}}) == v);
    CHECK(code_of([&] { crop(v, {{0, 0, 0}, {5, 6, 7}}); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { crop(v, {{2, 0, 0}, {1, 5, 6}}); }) == ErrorCode::OutOfBounds);
    CHECK(code_of([&] { crop(v, {{-1, 0, 0}, {1, 5, 6}}); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("nested crops compose") {
    const Volume v = random_volume({12, 14, 16}, 4);
    const Volume once = crop(crop(v, {{2, 3, 4}, {10, 12, 14}}), {{1, 2, 3}, {5, 6, 7}});
    const Volume direct = crop(v, {{3, 5, 7}, {7, 9, 11}});
    CHECK(once.dims() == direct.dims());
    CHECK(once.voxels() == direct.voxels());
    CHECK(testsupport::max_abs_diff(once.geometry().origin, direct.geometry().origin) <= 1e-12);
}

TEST_CASE("resample identity, constants and requested size") {
    const Volume v = random_volume({6, 7, 8}, 5);
    const Volume same = resample(v, v.dims());
    CHECK(same.geometry() == v.geometry());
    for (std::size_t i = 0; i < v.voxels().size(); ++i) CHECK(same.voxels()[i] == doctest::Approx(v.voxels()[i]).epsilon(1e-6));

    const Volume flat(Geometry{{9, 11, 13}, {1, 1, 1}, {}}, 3.25f);
    const Volume up = resample(flat, {72, 128, 128});
    CHECK(up.dims() == Dims3{72, 128, 128});
    CHECK(std::all_of(up.voxels().begin(), up.voxels().end(), [](float x) { return x == 3.25f; }));
}

TEST_CASE("resample preserves extent, first voxel and value bounds") {
    const Volume v = random_volume({10, 9, 8}, 6);
    const Volume r = resample(v, {7, 13, 5});
    CHECK(r.geometry().origin == v.geometry().origin);
    const Vec3 a = v.geometry().extent(), b = r.geometry().extent();
    CHECK(a.x == doctest::Approx(b.x));
    CHECK(a.y == doctest::Approx(b.y));
    CHECK(a.z == doctest::Approx(b.z));
    const auto [lo, hi] = std::minmax_element(v.voxels().begin(), v.voxels().end());
    for (float x : r.voxels()) {
        CHECK_UNARY(x >= *lo);
        CHECK_UNARY(x <= *hi);
    }
}

TEST_CASE("voxel and world coordinates round-trip") {
    Geometry g{{4, 4, 4}, {2, 2, 2}, {5, -3, 1}};
    CHECK(g.voxel_to_world({0, 0, 0}) == g.origin);
    CHECK(g.voxel_to_world({1, 1, 1}) == Vec3{7, -1, 3});

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    Geometry h{{10, 10, 10}, {0.37, 1.9, 2.3}, {-17.2, 4.4, 99.1}};
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p{u(rng), u(rng), u(rng)};
        worst = std::max(worst, testsupport::max_abs_diff(h.voxel_to_world(h.world_to_voxel(p)), p));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("landmarks map between grids over the same region") {
    Geometry src{{100, 100, 100}, {1, 1, 1}, {0, 0, 0}};
    Geometry dst{{50, 50, 50}, {2, 2, 2}, {0, 0, 0}};
    LandmarkSet lm;
    for (auto& p : lm.points) p = src.voxel_to_world({10, 10, 10});
    lm.points[1] = src.voxel_to_world({50, 50, 50}); // grid centre
    const LandmarkSet m = map_landmarks(lm, src, dst);
    const VoxelCoord v = dst.world_to_voxel(m.points[0]);
    CHECK(v.z == doctest::Approx(5.0));
    CHECK(v.y == doctest::Approx(5.0));
    CHECK(v.x == doctest::Approx(5.0));
    const VoxelCoord c = dst.world_to_voxel(m.points[1]);
    CHECK(c.z == doctest::Approx(25.0));
    CHECK(c.x == doctest::Approx(25.0));

    const LandmarkSet same = map_landmarks(lm, src, src);
    for (std::size_t i = 0; i < kLandmarkCount; ++i) CHECK(testsupport::max_abs_diff(same.points[i], lm.points[i]) <= 1e-12);

    Geometry wrong{{50, 50, 50}, {2.1, 2, 2}, {0, 0, 0}};
    CHECK(code_of([&] { map_landmarks(lm, src, wrong); }) == ErrorCode::ExtentMismatch);
}

TEST_CASE("resampled grid carries landmarks") {
    const Volume v = random_volume({20, 30, 40}, 8);
    const Volume r = resample(v, {10, 12, 16});
    LandmarkSet lm;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) lm.points[i] = v.voxel_to_world({2.0 * i, 3.0 * i, 4.0 * i});
    const LandmarkSet m = map_landmarks(lm, v.geometry(), r.geometry());
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const VoxelCoord a = v.world_to_voxel(lm.points[i]), b = r.world_to_voxel(m.points[i]);
        CHECK(b.z == doctest::Approx(a.z * 10.0 / 20.0));
        CHECK(b.y == doctest::Approx(a.y * 12.0 / 30.0));
        CHECK(b.x == doctest::Approx(a.x * 16.0 / 40.0));
    }
}

TEST_CASE("landmark validation") {
    LandmarkSet lm;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) lm.points[i] = {double(i), 0, 0};
    CHECK_NOTHROW(validate(lm));
    lm.points[1] = lm.points[0];
    CHECK_THROWS_AS(validate(lm), Error);
    lm.points[1] = {1, 0, std::nan("")};
    CHECK_THROWS_AS(validate(lm), Error);
}

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS((Geometry{{0, 1, 1}, {1, 1, 1}, {}}.validate()), Error);
    CHECK_THROWS_AS((Geometry{{1, 1, 1}, {1, 0, 1}, {}}.validate()), Error);
    CHECK_NOTHROW((Geometry{{1, 1, 1}, {1, 1, 1}, {}}.validate()));
}

}
