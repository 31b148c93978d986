#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "laminaplan/vec3.hpp"

namespace laminaplan {

/**
 * The seven vertebral landmarks, in world millimetres.
 *
 *   A  centre of the anterior edge of the vertebral body
 *   B  centre of the posterior edge of the vertebral body
 *   C  medial edge of the left pedicle
 *   D  lower edge of the left pedicle
 *   E  lower edge of the right pedicle
 *   F  medial edge of the right pedicle
 *   G  midpoint on the posterior side of the lower endplate
 */
enum class Landmark : std::size_t { A = 0, B, C, D, E, F, G };

inline constexpr std::size_t kLandmarkCount = 7;
inline constexpr std::array<std::string_view, kLandmarkCount> kLandmarkNames{"A", "B", "C", "D", "E", "F", "G"};

struct LandmarkSet {
    std::array<Vec3, kLandmarkCount> points{};

    Vec3& operator[](Landmark l) { return points[static_cast<std::size_t>(l)]; }
    const Vec3& operator[](Landmark l) const { return points[static_cast<std::size_t>(l)]; }

    bool operator==(const LandmarkSet&) const = default;
};

/// Throws Error(InvalidParameter) when a coordinate is non-finite or A == B.
void validate(const LandmarkSet& lm);

} // namespace laminaplan
