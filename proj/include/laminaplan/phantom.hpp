#pragma once

#include <cstdint>

#include "laminaplan/landmarks.hpp"
#include "laminaplan/vec3.hpp"
#include "laminaplan/volume.hpp"

namespace laminaplan {

/**
 * Parametric vertebra: a slab-clipped ellipsoidal body, two cylindrical
 * pedicles, and a posterior arch with a spinous process.
 *
 * Local anatomical coordinates are LPS-like with B at the origin:
 * +x left, +y posterior, +z superior. Lengths are millimetres.
 */
struct PhantomParams {
    double body_ap_half = 16.0;      ///< anteroposterior semi-axis of the body
    double body_lateral_half = 22.0; ///< lateral semi-axis of the body
    double body_height = 26.0;       ///< endplate-to-endplate height
    double pedicle_radius = 4.0;
    double pedicle_length = 12.0;
    double pedicle_medial_offset = 10.0;    ///< medial pedicle edge distance from midline
    double pedicle_superior_offset = 7.0;   ///< pedicle axis height above mid-body
    double lamina_thickness = 3.0;
    double spinous_length = 18.0;

    // Deformity knobs.
    double lateral_tilt_deg = 0.0; ///< rotation of the posterior elements about the AP axis through B
    double lr_skew = 0.0;          ///< medial offsets scale by (1 + skew) left and (1 - skew) right

    // Pose of the vertebra inside the volume.
    Vec3 rotation_deg{};  ///< Euler angles about world x, y, z
    Vec3 translation_mm{}; ///< offset of the vertebra centre from the volume centre

    double bone_hu = 400.0;
    double soft_tissue_hu = -100.0;
    double air_hu = -1000.0;
    double texture_hu = 0.0; ///< uniform per-voxel bone texture amplitude, seeded

    Dims3 dims{72, 128, 128};
    Vec3 spacing{1.0, 1.0, 1.0};
    std::uint64_t seed = 0;

    /// Throws InvalidParameter naming the first offending field.
    void validate() const;
};

/// Randomised anatomy and pose drawn from documented plausible ranges.
PhantomParams sample_phantom_params(std::uint64_t seed, const Dims3& dims = {72, 128, 128},
                                    const Vec3& spacing = {1.0, 1.0, 1.0});

/// Landmarks in local anatomical coordinates (before posing).
LandmarkSet phantom_local_landmarks(const PhantomParams& p);

/// Local anatomical point -> world mm.
Vec3 phantom_local_to_world(const PhantomParams& p, const Vec3& local);
Vec3 phantom_world_to_local(const PhantomParams& p, const Vec3& world);

/// Grid geometry, centred on the world origin.
Geometry phantom_geometry(const PhantomParams& p);

/// World landmarks without rasterising. Throws ParamsOutOfBounds if any falls outside the grid.
LandmarkSet phantom_landmarks(const PhantomParams& p);

struct Phantom {
    Volume volume;
    LandmarkSet landmarks;
};

Phantom generate_phantom(const PhantomParams& p);

/// Additive Gaussian noise; sigma 0 returns an identical copy.
Volume add_noise(const Volume& vol, double sigma_hu, std::uint64_t seed);

/// Isotropic Gaussian perturbation of every landmark coordinate; sigma 0 is the identity.
LandmarkSet jitter_landmarks(const LandmarkSet& lm, double sigma_mm, std::uint64_t seed);

} // namespace laminaplan
