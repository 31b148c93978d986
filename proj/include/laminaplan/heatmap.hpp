#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "laminaplan/io.hpp"
#include "laminaplan/landmarks.hpp"
#include "laminaplan/volume.hpp"

namespace laminaplan {

inline constexpr double kDefaultSigmaVoxels = 3.0;

/// Per-landmark heatmaps over one voxel grid. Values are kept in double so
/// the Gaussian amplitude is exact; files store them as float32.
struct HeatmapStack {
    Dims3 dims;
    std::vector<std::string> names; ///< channel -> landmark name
    std::vector<double> values;     ///< (C, Z, Y, X), C-order

    std::size_t channels() const { return names.size(); }
    std::size_t channel_size() const { return static_cast<std::size_t>(dims.count()); }
    const double* channel(std::size_t c) const { return values.data() + c * channel_size(); }
    double* channel(std::size_t c) { return values.data() + c * channel_size(); }

    bool operator==(const HeatmapStack&) const = default;
};

/// Peak value of the normalised 3D Gaussian with standard deviation `sigma`.
double gaussian_peak(double sigma);

/// Fill one channel with the isotropic normalised Gaussian centred at `center`
/// (voxel units, sigma in voxels). Throws InvalidSigma for sigma <= 0.
std::vector<double> make_target(const Dims3& dims, const VoxelCoord& center, double sigma);

/// Seven target channels, one per landmark, at the landmarks' voxel positions in `geometry`.
HeatmapStack make_targets(const Geometry& geometry, const LandmarkSet& lm, double sigma = kDefaultSigmaVoxels);

struct ChannelPeak {
    VoxelIndex voxel;
    bool degenerate = false; ///< every value in the channel was equal
};

/// Argmax of one channel; ties go to the lexicographically smallest (z, y, x).
ChannelPeak argmax_channel(const double* values, const Dims3& dims);

struct Localization {
    std::vector<std::string> names;
    std::vector<VoxelIndex> voxels;
    std::vector<Vec3> points; ///< world mm
    std::vector<std::string> warnings;
};

/// Per-channel argmax converted to world coordinates through `geometry`.
Localization localize(const HeatmapStack& h, const Geometry& geometry);

/// Same as `localize` but requires the standard A..G channel layout.
LandmarkSet localize_landmarks(const HeatmapStack& h, const Geometry& geometry, std::vector<std::string>* warnings = nullptr);

/// Mean squared difference over every channel and voxel.
double mse_loss(const HeatmapStack& pred, const HeatmapStack& target);

/// Euclidean distance in mm.
double localization_error(const Vec3& pred, const Vec3& truth);

struct LocalizationReport {
    std::vector<double> errors;
    double mean = 0.0;
    double std_dev = 0.0; ///< sample (n - 1) deviation, 0 for a single entry
};

LocalizationReport aggregate_errors(const std::vector<double>& errors);

// RTEN conversion: rank-4 (C, Z, Y, X), channels named A..G in order.
io::RawTensor to_raw_tensor(const HeatmapStack& h);
HeatmapStack from_raw_tensor(const io::RawTensor& t);

} // namespace laminaplan
