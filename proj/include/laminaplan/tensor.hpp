#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace laminaplan::nn {

/// Five-axis (B, C, Z, Y, X) float tensor, C-order.
struct Tensor5 {
    std::array<std::int64_t, 5> shape{0, 0, 0, 0, 0};
    std::vector<float> data;

    Tensor5() = default;
    Tensor5(std::int64_t b, std::int64_t c, std::int64_t z, std::int64_t y, std::int64_t x, float fill = 0.0f)
        : shape{b, c, z, y, x}, data(static_cast<std::size_t>(b * c * z * y * x), fill) {}

    std::int64_t batch() const { return shape[0]; }
    std::int64_t channels() const { return shape[1]; }
    std::int64_t depth() const { return shape[2]; }
    std::int64_t height() const { return shape[3]; }
    std::int64_t width() const { return shape[4]; }
    std::int64_t spatial() const { return shape[2] * shape[3] * shape[4]; }
    std::size_t size() const { return data.size(); }

    std::size_t offset(std::int64_t b, std::int64_t c, std::int64_t z, std::int64_t y, std::int64_t x) const {
        return static_cast<std::size_t>((((b * shape[1] + c) * shape[2] + z) * shape[3] + y) * shape[4] + x);
    }
    float& at(std::int64_t b, std::int64_t c, std::int64_t z, std::int64_t y, std::int64_t x) { return data[offset(b, c, z, y, x)]; }
    float at(std::int64_t b, std::int64_t c, std::int64_t z, std::int64_t y, std::int64_t x) const { return data[offset(b, c, z, y, x)]; }

    bool operator==(const Tensor5&) const = default;
};

std::string shape_string(const std::array<std::int64_t, 5>& shape);

} // namespace laminaplan::nn
