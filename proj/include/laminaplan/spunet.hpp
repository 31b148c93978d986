#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "laminaplan/heatmap.hpp"
#include "laminaplan/io.hpp"
#include "laminaplan/layers.hpp"
#include "laminaplan/tensor.hpp"
#include "laminaplan/volume.hpp"

namespace laminaplan::nn {

/**
 * Layer plan of the spatial-pyramid-upsampling U-Net.
 *
 * Encoder: four stages of two (3x3x3 conv, batch norm, ReLU) blocks, separated
 * by three patch merges. Decoder: patch expand (S = 2) of the coarser feature,
 * concatenated ahead of the skip connection, then two conv blocks. The pyramid
 * head compresses the bottleneck and each decoder stage to `pyramid_channels`
 * with a 1x1x1 conv, expands each to full resolution (S = 8, 4, 2, 1),
 * concatenates them and applies a 3x3x3 output conv.
 */
struct SpuNetConfig {
    Dims3 input{72, 128, 128};
    std::array<std::int64_t, 4> widths{16, 32, 64, 128};
    std::int64_t in_channels = 1;
    std::int64_t out_channels = 7;
    std::int64_t pyramid_channels = 8;
    double bn_eps = 1e-5;

    static SpuNetConfig reference() { return {}; }
    static SpuNetConfig smoke() {
        SpuNetConfig c;
        c.input = {24, 32, 32};
        c.widths = {4, 8, 16, 32};
        return c;
    }

    /// Throws unless input dims are divisible by 8 and all widths are positive.
    void validate() const;
};

struct ParamSpec {
    std::string name;
    std::vector<std::uint32_t> shape;
};

/// Every parameter the architecture needs, in canonical order.
std::vector<ParamSpec> architecture_manifest(const SpuNetConfig& config);

/// Human-readable manifest listing, one parameter per line.
std::string format_manifest(const SpuNetConfig& config);

struct WeightRecord {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::vector<float> values;

    bool operator==(const WeightRecord&) const = default;
};

/// Ordered, immutable-after-load collection of named parameter blocks.
class WeightStore {
public:
    WeightStore() = default;
    explicit WeightStore(std::vector<WeightRecord> records);

    const std::vector<WeightRecord>& records() const { return records_; }
    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    /// Throws LoadError naming `name` when absent.
    const WeightRecord& get(const std::string& name) const;

    /// Throws LoadError naming the first missing, mis-shaped, or unexpected layer.
    void validate(const SpuNetConfig& config) const;

    bool operator==(const WeightStore& o) const { return records_ == o.records_; }

private:
    std::vector<WeightRecord> records_;
    std::map<std::string, std::size_t> index_;
};

// SPUW: "SPUW", version 0x01, record count (u32); per record: name length (u16),
// UTF-8 name, rank (u8), dims (u32 each), f32 payload.
io::Bytes save_weights(const WeightStore& store);
/// Parses and validates against `config`; never returns a partial store.
WeightStore load_weights(std::span<const std::uint8_t> bytes, const SpuNetConfig& config);
/// Parses without architecture validation.
WeightStore parse_weights(std::span<const std::uint8_t> bytes);

/// He-style random initialisation matching the manifest.
WeightStore random_weights(const SpuNetConfig& config, std::uint64_t seed);
/// Every conv kernel zero, batch norm identity, biases `bias`.
WeightStore constant_weights(const SpuNetConfig& config, float bias);

struct ForwardOptions {
    int threads = 0; ///< <= 0: OpenMP default
};

/// Raw network output (1, out_channels, Z, Y, X) for a (1, in_channels, Z, Y, X) input.
Tensor5 forward_tensor(const Tensor5& input, const WeightStore& weights, const SpuNetConfig& config,
                       const ForwardOptions& options = {});

/// Heatmaps for one volume. The volume dims must equal `config.input`.
HeatmapStack forward(const Volume& vol, const WeightStore& weights, const SpuNetConfig& config,
                     const ForwardOptions& options = {});

} // namespace laminaplan::nn
