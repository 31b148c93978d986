#include "laminaplan/heatmap.hpp"

#include <cmath>
#include <numbers>

#include "laminaplan/error.hpp"

namespace laminaplan {

double gaussian_peak(double sigma) {
    return 1.0 / (std::pow(2.0 * std::numbers::pi, 1.5) * sigma * sigma * sigma);
}

std::vector<double> make_target(const Dims3& dims, const VoxelCoord& center, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw Error(ErrorCode::InvalidSigma, "heatmap sigma must be > 0", "sigma");
    if (dims.nz < 1 || dims.ny < 1 || dims.nx < 1)
        throw Error(ErrorCode::InvalidParameter, "heatmap dims must be >= 1", "dims");

    const double peak = gaussian_peak(sigma);
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    std::vector<double> out(static_cast<std::size_t>(dims.count()));

    // exp(-(dz²+dy²+dx²)/2σ²) evaluated directly per voxel so the centre is exactly `peak`.
#pragma omp parallel for schedule(static)
    for (std::int64_t z = 0; z < dims.nz; ++z) {
        const double dz = static_cast<double>(z) - center.z;
        for (std::int64_t y = 0; y < dims.ny; ++y) {
            const double dy = static_cast<double>(y) - center.y;
            double* row = out.data() + static_cast<std::size_t>((z * dims.ny + y) * dims.nx);
            for (std::int64_t x = 0; x < dims.nx; ++x) {
                const double dx = static_cast<double>(x) - center.x;
                row[x] = peak * std::exp(-(dz * dz + dy * dy + dx * dx) * inv_two_var);
            }
        }
    }
    return out;
}

HeatmapStack make_targets(const Geometry& geometry, const LandmarkSet& lm, double sigma) {
    HeatmapStack h;
    h.dims = geometry.dims;
    h.values.reserve(kLandmarkCount * h.channel_size());
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        h.names.emplace_back(kLandmarkNames[i]);
        const auto ch = make_target(geometry.dims, geometry.world_to_voxel(lm.points[i]), sigma);
        h.values.insert(h.values.end(), ch.begin(), ch.end());
    }
    return h;
}

ChannelPeak argmax_channel(const double* values, const Dims3& dims) {
    const auto n = static_cast<std::size_t>(dims.count());
    if (n == 0) throw Error(ErrorCode::EmptyInput, "empty heatmap channel");
    std::size_t best = 0;
    bool all_equal = true;
    for (std::size_t i = 1; i < n; ++i) {
        if (values[i] > values[best]) best = i; // strict: first (smallest) index wins ties
        if (values[i] != values[0]) all_equal = false;
    }
    const auto plane = static_cast<std::size_t>(dims.ny * dims.nx);
    ChannelPeak p;
    p.voxel = {static_cast<std::int64_t>(best / plane), static_cast<std::int64_t>((best % plane) / static_cast<std::size_t>(dims.nx)),
               static_cast<std::int64_t>(best % static_cast<std::size_t>(dims.nx))};
    p.degenerate = all_equal;
    return p;
}

Localization localize(const HeatmapStack& h, const Geometry& geometry) {
    if (h.dims != geometry.dims)
        throw Error(ErrorCode::ShapeMismatch, "heatmap dims do not match the reference geometry");
    if (h.values.size() != h.channels() * h.channel_size())
        throw Error(ErrorCode::ShapeMismatch, "heatmap payload does not match channels x dims");
    Localization out;
    for (std::size_t c = 0; c < h.channels(); ++c) {
        const ChannelPeak peak = argmax_channel(h.channel(c), h.dims);
        out.names.push_back(h.names[c]);
        out.voxels.push_back(peak.voxel);
        out.points.push_back(geometry.voxel_to_world({static_cast<double>(peak.voxel.z), static_cast<double>(peak.voxel.y),
                                                      static_cast<double>(peak.voxel.x)}));
        if (peak.degenerate) out.warnings.push_back("degenerate channel " + h.names[c] + ": all values equal");
    }
    return out;
}

LandmarkSet localize_landmarks(const HeatmapStack& h, const Geometry& geometry, std::vector<std::string>* warnings) {
    if (h.channels() != kLandmarkCount)
        throw Error(ErrorCode::ShapeMismatch,
                    "expected " + std::to_string(kLandmarkCount) + " heatmap channels, got " + std::to_string(h.channels()));
    const Localization loc = localize(h, geometry);
    LandmarkSet lm;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) lm.points[i] = loc.points[i];
    if (warnings) *warnings = loc.warnings;
    return lm;
}

double mse_loss(const HeatmapStack& pred, const HeatmapStack& target) {
    if (pred.dims != target.dims || pred.channels() != target.channels() || pred.values.size() != target.values.size())
        throw Error(ErrorCode::ShapeMismatch, "mse_loss: prediction and target shapes differ");
    if (pred.values.empty()) throw Error(ErrorCode::EmptyInput, "mse_loss: empty heatmaps");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        const double d = pred.values[i] - target.values[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pred.values.size());
}

double localization_error(const Vec3& pred, const Vec3& truth) {
    const double dx = pred.x - truth.x, dy = pred.y - truth.y, dz = pred.z - truth.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

LocalizationReport aggregate_errors(const std::vector<double>& errors) {
    if (errors.empty()) throw Error(ErrorCode::EmptyInput, "cannot aggregate an empty error list");
    // Welford's update.
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double e : errors) {
        ++n;
        const double delta = e - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (e - mean);
    }
    LocalizationReport r;
    r.errors = errors;
    r.mean = mean;
    r.std_dev = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    return r;
}

io::RawTensor to_raw_tensor(const HeatmapStack& h) {
    io::RawTensor t;
    t.shape = {static_cast<std::uint32_t>(h.channels()), static_cast<std::uint32_t>(h.dims.nz),
               static_cast<std::uint32_t>(h.dims.ny), static_cast<std::uint32_t>(h.dims.nx)};
    t.data.resize(h.values.size());
    for (std::size_t i = 0; i < h.values.size(); ++i) t.data[i] = static_cast<float>(h.values[i]);
    return t;
}

HeatmapStack from_raw_tensor(const io::RawTensor& t) {
    if (t.shape.size() != 4)
        throw Error(ErrorCode::ShapeMismatch, "heatmap tensors must be rank 4 (C, Z, Y, X), got rank " + std::to_string(t.shape.size()));
    HeatmapStack h;
    h.dims = {t.shape[1], t.shape[2], t.shape[3]};
    for (std::uint32_t c = 0; c < t.shape[0]; ++c)
        h.names.push_back(c < kLandmarkCount ? std::string(kLandmarkNames[c]) : "ch" + std::to_string(c));
    h.values.assign(t.data.begin(), t.data.end());
    return h;
}

} // namespace laminaplan
