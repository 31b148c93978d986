#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "laminaplan/landmarks.hpp"
#include "laminaplan/vec3.hpp"

namespace laminaplan {

/// Voxel counts in storage order (nz, ny, nx).
struct Dims3 {
    std::int64_t nz = 1;
    std::int64_t ny = 1;
    std::int64_t nx = 1;

    std::int64_t count() const { return nz * ny * nx; }
    bool operator==(const Dims3&) const = default;
};

/// Fractional voxel position, (z, y, x) order to match storage.
struct VoxelCoord {
    double z = 0.0;
    double y = 0.0;
    double x = 0.0;

    bool operator==(const VoxelCoord&) const = default;
};

/// Integer voxel index (z, y, x).
struct VoxelIndex {
    std::int64_t z = 0;
    std::int64_t y = 0;
    std::int64_t x = 0;

    bool operator==(const VoxelIndex&) const = default;
};

/// Inclusive voxel-index box.
struct BoundingBox {
    VoxelIndex lo;
    VoxelIndex hi;

    bool operator==(const BoundingBox&) const = default;
};

/// Geometry of a voxel grid without its payload.
struct Geometry {
    Dims3 dims;
    Vec3 spacing{1.0, 1.0, 1.0}; ///< (sx, sy, sz) mm per voxel
    Vec3 origin{};               ///< world position of voxel (0,0,0) centre

    bool operator==(const Geometry&) const = default;

    Vec3 voxel_to_world(const VoxelCoord& idx) const {
        return {origin.x + idx.x * spacing.x, origin.y + idx.y * spacing.y, origin.z + idx.z * spacing.z};
    }
    VoxelCoord world_to_voxel(const Vec3& p) const {
        return {(p.z - origin.z) / spacing.z, (p.y - origin.y) / spacing.y, (p.x - origin.x) / spacing.x};
    }
    /// Physical extent n * spacing per world axis.
    Vec3 extent() const {
        return {static_cast<double>(dims.nx) * spacing.x, static_cast<double>(dims.ny) * spacing.y,
                static_cast<double>(dims.nz) * spacing.z};
    }

    /// Throws unless every dim >= 1 and every spacing > 0 (finite).
    void validate() const;
};

/**
 * Scalar voxel grid, stored z-major with x fastest.
 *
 * The payload is 32-bit float to match the on-disk format.
 */
class Volume {
public:
    Volume() = default;
    explicit Volume(const Geometry& geometry, float fill = 0.0f);
    Volume(const Geometry& geometry, std::vector<float> voxels);

    const Geometry& geometry() const { return geometry_; }
    const Dims3& dims() const { return geometry_.dims; }
    const Vec3& spacing() const { return geometry_.spacing; }
    const Vec3& origin() const { return geometry_.origin; }

    std::size_t index(std::int64_t z, std::int64_t y, std::int64_t x) const {
        return static_cast<std::size_t>((z * geometry_.dims.ny + y) * geometry_.dims.nx + x);
    }
    float& at(std::int64_t z, std::int64_t y, std::int64_t x) { return voxels_[index(z, y, x)]; }
    float at(std::int64_t z, std::int64_t y, std::int64_t x) const { return voxels_[index(z, y, x)]; }

    std::vector<float>& voxels() { return voxels_; }
    const std::vector<float>& voxels() const { return voxels_; }

    Vec3 voxel_to_world(const VoxelCoord& idx) const { return geometry_.voxel_to_world(idx); }
    VoxelCoord world_to_voxel(const Vec3& p) const { return geometry_.world_to_voxel(p); }

    bool operator==(const Volume&) const = default;

private:
    Geometry geometry_;
    std::vector<float> voxels_;
};

/// Default intensity window (HU-like).
inline constexpr double kDefaultWindowMin = -200.0;
inline constexpr double kDefaultWindowMax = 600.0;

/// Clamp-and-ramp intensity window mapping into [0, 1].
Volume apply_window(const Volume& vol, double w_min = kDefaultWindowMin, double w_max = kDefaultWindowMax);

/// Scalar version of the window map, exposed for reuse and testing.
double window_value(double value, double w_min, double w_max);

/// Copy of the voxels inside `box`; origin moves to the world position of `box.lo`.
Volume crop(const Volume& vol, const BoundingBox& box);

/**
 * Trilinear resample onto `target` dims.
 *
 * The first voxel centre stays put and spacing becomes n_src*s_src/n_dst, so
 * the region [origin, origin + n*s) is preserved. Sample positions outside the
 * source grid clamp to the nearest border voxel.
 */
Volume resample(const Volume& vol, const Dims3& target);

/// Map landmarks between two grids covering the same physical region.
LandmarkSet map_landmarks(const LandmarkSet& lm, const Geometry& src, const Geometry& dst);

} // namespace laminaplan
