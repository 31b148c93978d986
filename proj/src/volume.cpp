#include "laminaplan/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laminaplan/error.hpp"

namespace laminaplan {

void Geometry::validate() const {
    if (dims.nz < 1 || dims.ny < 1 || dims.nx < 1)
        throw Error(ErrorCode::InvalidParameter, "volume dims must all be >= 1", "dims");
    for (double s : {spacing.x, spacing.y, spacing.z}) {
        if (!(s > 0.0) || !std::isfinite(s))
            throw Error(ErrorCode::InvalidParameter, "volume spacing must be finite and > 0", "spacing");
    }
    if (!origin.is_finite()) throw Error(ErrorCode::InvalidParameter, "volume origin must be finite", "origin");
}

Volume::Volume(const Geometry& geometry, float fill) : geometry_(geometry) {
    geometry_.validate();
    voxels_.assign(static_cast<std::size_t>(geometry_.dims.count()), fill);
}

Volume::Volume(const Geometry& geometry, std::vector<float> voxels) : geometry_(geometry), voxels_(std::move(voxels)) {
    geometry_.validate();
    if (voxels_.size() != static_cast<std::size_t>(geometry_.dims.count()))
        throw Error(ErrorCode::ShapeMismatch,
                    "voxel count " + std::to_string(voxels_.size()) + " does not match dims product " +
                        std::to_string(geometry_.dims.count()));
}

double window_value(double value, double w_min, double w_max) {
    if (value <= w_min) return 0.0;
    if (value >= w_max) return 1.0;
    return (value - w_min) / (w_max - w_min);
}

Volume apply_window(const Volume& vol, double w_min, double w_max) {
    if (!(w_min < w_max))
        throw Error(ErrorCode::InvalidWindow,
                    "window requires w_min < w_max (got " + std::to_string(w_min) + ", " + std::to_string(w_max) + ")");
    Volume out(vol.geometry());
    const auto& src = vol.voxels();
    auto& dst = out.voxels();
    const auto n = static_cast<std::int64_t>(src.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        dst[static_cast<std::size_t>(i)] = static_cast<float>(window_value(src[static_cast<std::size_t>(i)], w_min, w_max));
    return out;
}

Volume crop(const Volume& vol, const BoundingBox& box) {
    const Dims3& d = vol.dims();
    const auto bad = [](std::int64_t lo, std::int64_t hi, std::int64_t n) { return lo < 0 || hi < lo || hi >= n; };
    if (bad(box.lo.z, box.hi.z, d.nz) || bad(box.lo.y, box.hi.y, d.ny) || bad(box.lo.x, box.hi.x, d.nx))
        throw Error(ErrorCode::OutOfBounds, "crop box [" + std::to_string(box.lo.z) + "," + std::to_string(box.lo.y) +
                                                "," + std::to_string(box.lo.x) + "]..[" + std::to_string(box.hi.z) +
                                                "," + std::to_string(box.hi.y) + "," + std::to_string(box.hi.x) +
                                                "] exceeds volume dims",
                    "box");

    Geometry g = vol.geometry();
    g.dims = {box.hi.z - box.lo.z + 1, box.hi.y - box.lo.y + 1, box.hi.x - box.lo.x + 1};
    g.origin = vol.voxel_to_world({static_cast<double>(box.lo.z), static_cast<double>(box.lo.y),
                                   static_cast<double>(box.lo.x)});
    Volume out(g);
    for (std::int64_t z = 0; z < g.dims.nz; ++z)
        for (std::int64_t y = 0; y < g.dims.ny; ++y) {
            const float* src = &vol.voxels()[vol.index(z + box.lo.z, y + box.lo.y, box.lo.x)];
            std::copy(src, src + g.dims.nx, &out.voxels()[out.index(z, y, 0)]);
        }
    return out;
}

namespace {

struct AxisSample {
    std::int64_t i0;
    std::int64_t i1;
    double frac;
};

AxisSample axis_sample(double pos, std::int64_t n) {
    pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    const auto i0 = static_cast<std::int64_t>(std::floor(pos));
    const std::int64_t i1 = std::min(i0 + 1, n - 1);
    return {i0, i1, pos - static_cast<double>(i0)};
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

} // namespace

Volume resample(const Volume& vol, const Dims3& target) {
    if (target.nz < 1 || target.ny < 1 || target.nx < 1)
        throw Error(ErrorCode::InvalidParameter, "resample target dims must be >= 1", "dims");
    const Dims3& s = vol.dims();
    Geometry g = vol.geometry();
    g.dims = target;
    g.spacing = {vol.spacing().x * static_cast<double>(s.nx) / static_cast<double>(target.nx),
                 vol.spacing().y * static_cast<double>(s.ny) / static_cast<double>(target.ny),
                 vol.spacing().z * static_cast<double>(s.nz) / static_cast<double>(target.nz)};
    Volume out(g);

    const double rz = static_cast<double>(s.nz) / static_cast<double>(target.nz);
    const double ry = static_cast<double>(s.ny) / static_cast<double>(target.ny);
    const double rx = static_cast<double>(s.nx) / static_cast<double>(target.nx);

    std::vector<AxisSample> xs(static_cast<std::size_t>(target.nx));
    for (std::int64_t x = 0; x < target.nx; ++x) xs[static_cast<std::size_t>(x)] = axis_sample(static_cast<double>(x) * rx, s.nx);

#pragma omp parallel for schedule(static)
    for (std::int64_t z = 0; z < target.nz; ++z) {
        const AxisSample az = axis_sample(static_cast<double>(z) * rz, s.nz);
        for (std::int64_t y = 0; y < target.ny; ++y) {
            const AxisSample ay = axis_sample(static_cast<double>(y) * ry, s.ny);
            for (std::int64_t x = 0; x < target.nx; ++x) {
                const AxisSample& ax = xs[static_cast<std::size_t>(x)];
                const auto v = [&](std::int64_t zi, std::int64_t yi, std::int64_t xi) {
                    return static_cast<double>(vol.at(zi, yi, xi));
                };
                const double c00 = lerp(v(az.i0, ay.i0, ax.i0), v(az.i0, ay.i0, ax.i1), ax.frac);
                const double c01 = lerp(v(az.i0, ay.i1, ax.i0), v(az.i0, ay.i1, ax.i1), ax.frac);
                const double c10 = lerp(v(az.i1, ay.i0, ax.i0), v(az.i1, ay.i0, ax.i1), ax.frac);
                const double c11 = lerp(v(az.i1, ay.i1, ax.i0), v(az.i1, ay.i1, ax.i1), ax.frac);
                const double c0 = lerp(c00, c01, ay.frac);
                const double c1 = lerp(c10, c11, ay.frac);
                out.at(z, y, x) = static_cast<float>(lerp(c0, c1, az.frac));
            }
        }
    }
    return out;
}

LandmarkSet map_landmarks(const LandmarkSet& lm, const Geometry& src, const Geometry& dst) {
    src.validate();
    dst.validate();
    const Vec3 es = src.extent(), ed = dst.extent();
    const auto mismatch = [](double a, double b) { return std::abs(a - b) > 1e-6 * std::max(std::abs(a), std::abs(b)); };
    if (mismatch(es.x, ed.x) || mismatch(es.y, ed.y) || mismatch(es.z, ed.z))
        throw Error(ErrorCode::ExtentMismatch, "source and destination grids cover different physical extents");

    const double fz = static_cast<double>(dst.dims.nz) / static_cast<double>(src.dims.nz);
    const double fy = static_cast<double>(dst.dims.ny) / static_cast<double>(src.dims.ny);
    const double fx = static_cast<double>(dst.dims.nx) / static_cast<double>(src.dims.nx);
    LandmarkSet out;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const VoxelCoord v = src.world_to_voxel(lm.points[i]);
        out.points[i] = dst.voxel_to_world({v.z * fz, v.y * fy, v.x * fx});
    }
    return out;
}

} // namespace laminaplan
