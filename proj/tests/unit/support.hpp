#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "laminaplan/landmarks.hpp"
#include "laminaplan/layers.hpp"
#include "laminaplan/vec3.hpp"

namespace testsupport {

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("laminaplan_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Direct nested-loop cross-correlation with zero padding, accumulated in double.
inline laminaplan::nn::Tensor5 naive_conv3d(const laminaplan::nn::Tensor5& in, const laminaplan::nn::ConvParams& p) {
    using laminaplan::nn::Tensor5;
    const std::int64_t k = p.kernel, pad = k / 2;
    Tensor5 out(in.batch(), p.out_channels, in.depth(), in.height(), in.width());
    for (std::int64_t b = 0; b < in.batch(); ++b)
        for (std::int64_t o = 0; o < p.out_channels; ++o)
            for (std::int64_t z = 0; z < in.depth(); ++z)
                for (std::int64_t y = 0; y < in.height(); ++y)
                    for (std::int64_t x = 0; x < in.width(); ++x) {
                        double acc = p.bias[static_cast<std::size_t>(o)];
                        for (std::int64_t c = 0; c < p.in_channels; ++c)
                            for (std::int64_t dz = 0; dz < k; ++dz)
                                for (std::int64_t dy = 0; dy < k; ++dy)
                                    for (std::int64_t dx = 0; dx < k; ++dx) {
                                        const std::int64_t zz = z + dz - pad, yy = y + dy - pad, xx = x + dx - pad;
                                        if (zz < 0 || yy < 0 || xx < 0 || zz >= in.depth() || yy >= in.height() ||
                                            xx >= in.width())
                                            continue;
                                        const std::size_t w =
                                            static_cast<std::size_t>((((o * p.in_channels + c) * k + dz) * k + dy) * k + dx);
                                        acc += static_cast<double>(p.weight[w]) * in.at(b, c, zz, yy, xx);
                                    }
                        out.at(b, o, z, y, x) = static_cast<float>(acc);
                    }
    return out;
}

/// Two-pass mean and sample standard deviation.
inline std::pair<double, double> two_pass_stats(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

/// Random rotation from a uniformly drawn axis and angle.
inline laminaplan::Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> a(-3.14159, 3.14159);
    laminaplan::Vec3 axis{n(rng), n(rng), n(rng)};
    return laminaplan::rotation_about(laminaplan::normalized(axis), a(rng));
}

/**
 * A plausible landmark set in a random pose: left pedicle C/D on +u, right
 * E/F on -u, A anterior of B, G below the pedicles.
 */
inline laminaplan::LandmarkSet random_landmarks(std::mt19937_64& rng) {
    using laminaplan::Vec3;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto r = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    // local: x lateral (left +), y posterior, z superior
    laminaplan::LandmarkSet local;
    local.points[0] = {r(-2, 2), r(-40, -20), r(-2, 2)};
    local.points[1] = {0, 0, 0};
    local.points[2] = {r(6, 14), r(-3, 10), r(2, 9)};
    local.points[3] = {r(9, 18), r(-3, 10), r(-3, 3)};
    local.points[4] = {-r(9, 18), r(-3, 10), r(-3, 3)};
    local.points[5] = {-r(6, 14), r(-3, 10), r(2, 9)};
    local.points[6] = {r(-3, 3), r(-6, 2), r(-16, -10)};
    const laminaplan::Mat3 rot = random_rotation(rng);
    const Vec3 t{r(-50, 50), r(-50, 50), r(-50, 50)};
    laminaplan::LandmarkSet out;
    for (std::size_t i = 0; i < laminaplan::kLandmarkCount; ++i) out.points[i] = rot * local.points[i] + t;
    return out;
}

inline double max_abs_diff(const laminaplan::Vec3& a, const laminaplan::Vec3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

} // namespace testsupport
