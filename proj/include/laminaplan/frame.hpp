#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "laminaplan/landmarks.hpp"
#include "laminaplan/vec3.hpp"

namespace laminaplan {

/// Per-vertebra coordinate system: origin at B, X superior, Y toward the left
/// pedicle, Z posterior (from A to B). Right-handed and orthonormal.
struct Frame {
    Vec3 origin;
    Vec3 x_axis{1, 0, 0};
    Vec3 y_axis{0, 1, 0};
    Vec3 z_axis{0, 0, 1};

    /// World point -> (x, y, z) frame coordinates.
    Vec3 to_frame(const Vec3& p) const {
        const Vec3 d = p - origin;
        return {dot(x_axis, d), dot(y_axis, d), dot(z_axis, d)};
    }
    /// Frame coordinates -> world point.
    Vec3 from_frame(const Vec3& q) const { return origin + x_axis * q.x + y_axis * q.y + z_axis * q.z; }
};

/// Intermediate points of the frame construction, kept for planning and grading.
struct FrameConstruction {
    Frame frame;
    Vec3 c_proj, d_proj, e_proj, f_proj; ///< C', D', E', F' on the plane through B normal to Z
    Vec3 h_proj;                         ///< H' = (C' + D') / 2
    Vec3 i_proj;                         ///< I' = (E' + F') / 2
};

enum class PlaneName { LeftLongitudinal, RightLongitudinal, Transverse };
enum class PlaneKind { Longitudinal, Transverse };
enum class PlanMode { Total, Partial };

std::string_view to_string(PlaneName name);
std::string_view to_string(PlaneKind kind);
std::string_view to_string(PlanMode mode);
PlaneName plane_name_from_string(std::string_view s);
PlanMode plan_mode_from_string(std::string_view s);
PlaneKind kind_of(PlaneName name);

/// A cutting plane. Bone on the `resect_side` of the plane (sign relative to
/// `normal`) is removed.
struct CutPlane {
    PlaneName name = PlaneName::LeftLongitudinal;
    Vec3 point;
    Vec3 normal{0, 1, 0};
    int resect_side = 1;
};

/// Fraction of the medial pedicle edge's lateral offset at which the longitudinal cuts sit.
inline constexpr double kLongitudinalFraction = 0.75;
/// Fraction of the J -> G distance at which the transverse cut sits.
inline constexpr double kTransverseFraction = 0.4;

/// Orthogonal projection of `p` onto the plane through `origin` with unit `normal`.
/// A normal within 1e-3 of unit length is renormalised; anything else throws.
Vec3 project_onto_plane(const Vec3& p, const Vec3& origin, const Vec3& normal);

FrameConstruction construct_frame(const LandmarkSet& lm);
inline Frame fit_frame(const LandmarkSet& lm) { return construct_frame(lm).frame; }

/**
 * Cutting planes for one vertebra.
 *
 * Planes 1 and 2 are normal to Y through M and N, at 75% of the frame-y of C'
 * and F' respectively. Plane 3 (partial mode only) is normal to X through
 * K = J + 0.4 (G - J), J being the midpoint of D'E'; the caudal side is resected.
 * Throws Orientation when C' is not on +Y or F' is not on -Y.
 */
std::vector<CutPlane> plan_planes(const LandmarkSet& lm, PlanMode mode);

} // namespace laminaplan
