#include "laminaplan/phantom.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "laminaplan/error.hpp"
#include "laminaplan/rng.hpp"

namespace laminaplan {

namespace {

// Ellipsoid superior semi-axis relative to half the body height; >1 leaves flat endplates.
constexpr double kEndplateCap = 1.25;
// Pedicles start slightly inside the body so they join it.
constexpr double kPedicleRootDepth = 2.0;

double deg(double d) { return d * std::numbers::pi / 180.0; }

struct Layout {
    double ap, lat, height, cap;
    double r_p, length, h_p;
    double offset_left, offset_right; ///< pedicle axis distance from midline
    Mat3 tilt;                        ///< maps tilted posterior-element coords to local
    Mat3 tilt_inv;
    double ring_radius;
    double anchor_y;
};

Layout layout(const PhantomParams& p) {
    Layout l{};
    l.ap = p.body_ap_half;
    l.lat = p.body_lateral_half;
    l.height = p.body_height;
    l.cap = kEndplateCap * p.body_height / 2.0;
    l.r_p = p.pedicle_radius;
    l.length = p.pedicle_length;
    l.h_p = p.pedicle_superior_offset;
    l.offset_left = p.pedicle_medial_offset * (1.0 + p.lr_skew) + p.pedicle_radius;
    l.offset_right = p.pedicle_medial_offset * (1.0 - p.lr_skew) + p.pedicle_radius;
    l.tilt = rotation_about({0, 1, 0}, deg(p.lateral_tilt_deg));
    l.tilt_inv = l.tilt.transposed();
    l.ring_radius = 0.5 * (l.offset_left + l.offset_right);
    const double back = l.length + l.ring_radius + p.lamina_thickness / 2.0 + p.spinous_length;
    l.anchor_y = 0.5 * (-2.0 * l.ap + back);
    return l;
}

bool inside_bone(const Layout& l, const PhantomParams& p, const Vec3& q) {
    // vertebral body
    if (std::abs(q.z) <= l.height / 2.0) {
        const double ex = q.x / l.lat, ey = (q.y + l.ap) / l.ap, ez = q.z / l.cap;
        if (ex * ex + ey * ey + ez * ez <= 1.0) return true;
    }
    const Vec3 t = l.tilt_inv * q; // posterior elements live in tilted coordinates
    if (t.y >= -kPedicleRootDepth && t.y <= l.length) {
        for (double cx : {l.offset_left, -l.offset_right}) {
            const double dx = t.x - cx, dz = t.z - l.h_p;
            if (dx * dx + dz * dz <= l.r_p * l.r_p) return true;
        }
    }
    if (t.y >= l.length && std::abs(t.z - l.h_p) <= l.r_p + 2.0) {
        const double rho = std::hypot(t.x, t.y - l.length);
        if (std::abs(rho - l.ring_radius) <= p.lamina_thickness / 2.0) return true;
    }
    const double spine_start = l.length + l.ring_radius;
    return std::abs(t.x) <= p.lamina_thickness / 2.0 + 1.0 && t.y >= spine_start &&
           t.y <= spine_start + p.spinous_length && t.z >= l.h_p - l.r_p - 6.0 && t.z <= l.h_p + l.r_p;
}

} // namespace

void PhantomParams::validate() const {
    const auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(ErrorCode::InvalidParameter, std::string(field) + " must be finite and > 0", field);
    };
    positive(body_ap_half, "body_ap_half");
    positive(body_lateral_half, "body_lateral_half");
    positive(body_height, "body_height");
    positive(pedicle_radius, "pedicle_radius");
    positive(pedicle_length, "pedicle_length");
    positive(pedicle_medial_offset, "pedicle_medial_offset");
    positive(lamina_thickness, "lamina_thickness");
    positive(spinous_length, "spinous_length");
    positive(spacing.x, "spacing");
    positive(spacing.y, "spacing");
    positive(spacing.z, "spacing");
    if (dims.nz < 16 || dims.ny < 16 || dims.nx < 16)
        throw Error(ErrorCode::InvalidParameter, "phantom dims must be >= 16 per axis", "dims");
    for (double v : {bone_hu, soft_tissue_hu, air_hu, texture_hu})
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParameter, "intensities must be finite", "bone_hu");
    if (!(bone_hu > soft_tissue_hu))
        throw Error(ErrorCode::InvalidParameter, "bone intensity must exceed the background", "bone_hu");
    if (!(texture_hu >= 0.0)) throw Error(ErrorCode::InvalidParameter, "texture_hu must be >= 0", "texture_hu");
    if (!(std::abs(lr_skew) < 1.0)) throw Error(ErrorCode::InvalidParameter, "lr_skew must lie in (-1, 1)", "lr_skew");
    if (!(std::abs(lateral_tilt_deg) < 45.0))
        throw Error(ErrorCode::InvalidParameter, "lateral_tilt_deg must lie in (-45, 45)", "lateral_tilt_deg");
    if (!std::isfinite(pedicle_superior_offset) || !(pedicle_superior_offset - pedicle_radius > -body_height / 2.0))
        throw Error(ErrorCode::InvalidParameter, "pedicle lower edge must sit above the lower endplate",
                    "pedicle_superior_offset");
    if (!rotation_deg.is_finite() || !translation_mm.is_finite())
        throw Error(ErrorCode::InvalidParameter, "pose must be finite", "rotation_deg");
}

PhantomParams sample_phantom_params(std::uint64_t seed, const Dims3& dims, const Vec3& spacing) {
    Rng rng(seed);
    PhantomParams p;
    p.body_ap_half = rng.uniform(14.0, 19.0);
    p.body_lateral_half = rng.uniform(18.0, 26.0);
    p.body_height = rng.uniform(22.0, 30.0);
    p.pedicle_radius = rng.uniform(3.5, 5.0);
    p.pedicle_length = rng.uniform(10.0, 16.0);
    // with |skew| <= 0.1 the medial edges stay within 6-14 mm of the midline
    p.pedicle_medial_offset = rng.uniform(6.7, 12.7);
    p.pedicle_superior_offset = p.body_height / 2.0 - p.pedicle_radius - rng.uniform(1.0, 3.0);
    p.lamina_thickness = rng.uniform(2.5, 4.0);
    p.spinous_length = rng.uniform(14.0, 20.0);
    p.lateral_tilt_deg = rng.uniform(-8.0, 8.0);
    p.lr_skew = rng.uniform(-0.1, 0.1);
    p.rotation_deg = {rng.uniform(-15.0, 15.0), rng.uniform(-15.0, 15.0), rng.uniform(-15.0, 15.0)};
    p.translation_mm = {rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    p.dims = dims;
    p.spacing = spacing;
    p.seed = seed;
    return p;
}

LandmarkSet phantom_local_landmarks(const PhantomParams& p) {
    const Layout l = layout(p);
    const double mid = l.length / 2.0;
    const double g_y = -l.ap + l.ap * std::sqrt(1.0 - std::pow(l.height / 2.0 / l.cap, 2.0));
    LandmarkSet lm;
    lm[Landmark::A] = {0.0, -2.0 * l.ap, 0.0};
    lm[Landmark::B] = {0.0, 0.0, 0.0};
    lm[Landmark::C] = l.tilt * Vec3{l.offset_left - l.r_p, mid, l.h_p};
    lm[Landmark::D] = l.tilt * Vec3{l.offset_left, mid, l.h_p - l.r_p};
    lm[Landmark::E] = l.tilt * Vec3{-l.offset_right, mid, l.h_p - l.r_p};
    lm[Landmark::F] = l.tilt * Vec3{-(l.offset_right - l.r_p), mid, l.h_p};
    lm[Landmark::G] = {0.0, g_y, -l.height / 2.0};
    return lm;
}

Vec3 phantom_local_to_world(const PhantomParams& p, const Vec3& local) {
    const Layout l = layout(p);
    return p.translation_mm + rotation_from_euler_deg(p.rotation_deg) * (local - Vec3{0.0, l.anchor_y, 0.0});
}

Vec3 phantom_world_to_local(const PhantomParams& p, const Vec3& world) {
    const Layout l = layout(p);
    return rotation_from_euler_deg(p.rotation_deg).transposed() * (world - p.translation_mm) + Vec3{0.0, l.anchor_y, 0.0};
}

Geometry phantom_geometry(const PhantomParams& p) {
    Geometry g;
    g.dims = p.dims;
    g.spacing = p.spacing;
    g.origin = {-0.5 * static_cast<double>(p.dims.nx - 1) * p.spacing.x, -0.5 * static_cast<double>(p.dims.ny - 1) * p.spacing.y,
                -0.5 * static_cast<double>(p.dims.nz - 1) * p.spacing.z};
    return g;
}

LandmarkSet phantom_landmarks(const PhantomParams& p) {
    p.validate();
    const Geometry g = phantom_geometry(p);
    const LandmarkSet local = phantom_local_landmarks(p);
    LandmarkSet world;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        world.points[i] = phantom_local_to_world(p, local.points[i]);
        const VoxelCoord v = g.world_to_voxel(world.points[i]);
        const auto outside = [](double c, std::int64_t n) { return c < 0.0 || c > static_cast<double>(n - 1); };
        if (outside(v.z, g.dims.nz) || outside(v.y, g.dims.ny) || outside(v.x, g.dims.nx))
            throw Error(ErrorCode::ParamsOutOfBounds, "landmark falls outside the phantom volume",
                        std::string(kLandmarkNames[i]));
    }
    return world;
}

Phantom generate_phantom(const PhantomParams& p) {
    Phantom out{Volume(phantom_geometry(p)), phantom_landmarks(p)};
    const Layout l = layout(p);
    const Mat3 to_local = rotation_from_euler_deg(p.rotation_deg).transposed();
    const Vec3 anchor{0.0, l.anchor_y, 0.0};
    const Geometry& g = out.volume.geometry();
    // soft tissue is a cylinder along z filling most of the in-plane field of view
    const double tissue_radius =
        0.45 * std::min(static_cast<double>(g.dims.nx) * g.spacing.x, static_cast<double>(g.dims.ny) * g.spacing.y);

    auto& voxels = out.volume.voxels();
#pragma omp parallel for schedule(static)
    for (std::int64_t z = 0; z < g.dims.nz; ++z)
        for (std::int64_t y = 0; y < g.dims.ny; ++y)
            for (std::int64_t x = 0; x < g.dims.nx; ++x) {
                const Vec3 w = g.voxel_to_world({static_cast<double>(z), static_cast<double>(y), static_cast<double>(x)});
                const Vec3 q = to_local * (w - p.translation_mm) + anchor;
                double v = p.air_hu;
                if (inside_bone(l, p, q)) v = p.bone_hu;
                else if (std::hypot(w.x, w.y) <= tissue_radius) v = p.soft_tissue_hu;
                voxels[out.volume.index(z, y, x)] = static_cast<float>(v);
            }

    if (p.texture_hu > 0.0) {
        Rng rng(p.seed);
        for (float& v : voxels) {
            const double jitter = rng.uniform(-p.texture_hu, p.texture_hu);
            if (v == static_cast<float>(p.bone_hu)) v = static_cast<float>(p.bone_hu + jitter);
        }
    }
    return out;
}

Volume add_noise(const Volume& vol, double sigma_hu, std::uint64_t seed) {
    if (!(sigma_hu >= 0.0)) throw Error(ErrorCode::InvalidParameter, "noise sigma must be >= 0", "sigma");
    Volume out = vol;
    if (sigma_hu == 0.0) return out;
    Rng rng(seed);
    for (float& v : out.voxels()) v = static_cast<float>(static_cast<double>(v) + rng.normal(0.0, sigma_hu));
    return out;
}

LandmarkSet jitter_landmarks(const LandmarkSet& lm, double sigma_mm, std::uint64_t seed) {
    if (!(sigma_mm >= 0.0)) throw Error(ErrorCode::InvalidParameter, "jitter sigma must be >= 0", "sigma");
    if (sigma_mm == 0.0) return lm;
    Rng rng(seed);
    LandmarkSet out = lm;
    for (Vec3& p : out.points) {
        p.x += rng.normal(0.0, sigma_mm);
        p.y += rng.normal(0.0, sigma_mm);
        p.z += rng.normal(0.0, sigma_mm);
    }
    return out;
}

} // namespace laminaplan
