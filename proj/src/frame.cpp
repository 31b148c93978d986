#include "laminaplan/frame.hpp"

#include <cmath>
#include <string>

#include "laminaplan/error.hpp"

namespace laminaplan {

std::string_view to_string(PlaneName name) {
    switch (name) {
    case PlaneName::LeftLongitudinal: return "left_longitudinal";
    case PlaneName::RightLongitudinal: return "right_longitudinal";
    case PlaneName::Transverse: return "transverse";
    }
    return "unknown";
}

std::string_view to_string(PlaneKind kind) { return kind == PlaneKind::Longitudinal ? "longitudinal" : "transverse"; }
std::string_view to_string(PlanMode mode) { return mode == PlanMode::Total ? "total" : "partial"; }

PlaneName plane_name_from_string(std::string_view s) {
    if (s == "left_longitudinal") return PlaneName::LeftLongitudinal;
    if (s == "right_longitudinal") return PlaneName::RightLongitudinal;
    if (s == "transverse") return PlaneName::Transverse;
    throw Error(ErrorCode::Schema, "unknown plane name \"" + std::string(s) + "\"", "name");
}

PlanMode plan_mode_from_string(std::string_view s) {
    if (s == "total") return PlanMode::Total;
    if (s == "partial") return PlanMode::Partial;
    throw Error(ErrorCode::Schema, "plan mode must be \"total\" or \"partial\", got \"" + std::string(s) + "\"", "mode");
}

PlaneKind kind_of(PlaneName name) {
    return name == PlaneName::Transverse ? PlaneKind::Transverse : PlaneKind::Longitudinal;
}

Vec3 project_onto_plane(const Vec3& p, const Vec3& origin, const Vec3& normal) {
    const double len = norm(normal);
    if (!(std::abs(len - 1.0) <= 1e-3))
        throw Error(ErrorCode::InvalidParameter, "plane normal is not unit length (|n| = " + std::to_string(len) + ")", "normal");
    const Vec3 n = normal / len;
    return p - n * dot(p - origin, n);
}

FrameConstruction construct_frame(const LandmarkSet& lm) {
    for (std::size_t i = 0; i < kLandmarkCount; ++i)
        if (!lm.points[i].is_finite())
            throw Error(ErrorCode::InvalidParameter, "landmark has a non-finite coordinate", std::string(kLandmarkNames[i]));

    const Vec3& a = lm[Landmark::A];
    const Vec3& b = lm[Landmark::B];
    const Vec3 ab = b - a;
    if (norm(ab) < 1e-6) throw Error(ErrorCode::DegenerateAxis, "A and B are closer than 1e-6 mm", "A");

    FrameConstruction fc;
    Frame& f = fc.frame;
    f.origin = b;
    f.z_axis = normalized(ab);
    fc.c_proj = project_onto_plane(lm[Landmark::C], b, f.z_axis);
    fc.d_proj = project_onto_plane(lm[Landmark::D], b, f.z_axis);
    fc.e_proj = project_onto_plane(lm[Landmark::E], b, f.z_axis);
    fc.f_proj = project_onto_plane(lm[Landmark::F], b, f.z_axis);
    fc.h_proj = (fc.c_proj + fc.d_proj) * 0.5;
    fc.i_proj = (fc.e_proj + fc.f_proj) * 0.5;

    Vec3 lateral = fc.h_proj - fc.i_proj;
    if (norm(lateral) < 1e-6)
        throw Error(ErrorCode::DegeneratePedicle, "left and right pedicle midpoints coincide after projection", "C");
    // Projection already removed the Z component; strip the rounding residue too.
    lateral -= f.z_axis * dot(lateral, f.z_axis);
    f.y_axis = normalized(lateral);
    f.x_axis = cross(f.y_axis, f.z_axis);
    return fc;
}

std::vector<CutPlane> plan_planes(const LandmarkSet& lm, PlanMode mode) {
    const FrameConstruction fc = construct_frame(lm);
    const Frame& f = fc.frame;

    const double left = dot(f.y_axis, fc.c_proj - f.origin);
    const double right = dot(f.y_axis, fc.f_proj - f.origin);
    if (!(left > 0.0) || !(right < 0.0))
        throw Error(ErrorCode::Orientation,
                    "pedicle sides unresolved: frame-y of C' = " + std::to_string(left) + ", of F' = " + std::to_string(right),
                    left > 0.0 ? "F" : "C");

    std::vector<CutPlane> planes;
    planes.push_back({PlaneName::LeftLongitudinal, f.origin + f.y_axis * (kLongitudinalFraction * left), f.y_axis, +1});
    planes.push_back({PlaneName::RightLongitudinal, f.origin + f.y_axis * (kLongitudinalFraction * right), f.y_axis, -1});
    if (mode == PlanMode::Partial) {
        const Vec3 j = (fc.d_proj + fc.e_proj) * 0.5;
        const Vec3 k = j + (lm[Landmark::G] - j) * kTransverseFraction;
        planes.push_back({PlaneName::Transverse, k, f.x_axis, -1});
    }
    return planes;
}

} // namespace laminaplan
