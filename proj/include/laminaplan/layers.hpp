#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "laminaplan/tensor.hpp"

namespace laminaplan::nn {

/// Cubic convolution kernel (out, in, k, k, k) with per-output bias.
struct ConvParams {
    std::int64_t out_channels = 0;
    std::int64_t in_channels = 0;
    std::int64_t kernel = 3; ///< odd edge length; padding is kernel / 2, stride 1
    std::vector<float> weight;
    std::vector<float> bias;
};

/// Inference-mode batch norm statistics, one entry per channel.
struct BatchNormParams {
    std::vector<float> scale;
    std::vector<float> shift;
    std::vector<float> mean;
    std::vector<float> var;
    double eps = 1e-5;
};

/// `threads` <= 0 lets OpenMP choose. Results never depend on the thread count:
/// every output value is accumulated by one thread in a fixed order.
Tensor5 conv3d(const Tensor5& in, const ConvParams& conv, int threads = 0);

Tensor5 batchnorm3d(const Tensor5& in, const BatchNormParams& bn);
void relu_inplace(Tensor5& t);

/// Interval sampling: (B, C, Z, Y, X) -> (B, 8C, Z/2, Y/2, X/2). Output channel
/// c*8 + dz*4 + dy*2 + dx holds input voxel (2z+dz, 2y+dy, 2x+dx) of channel c.
Tensor5 space_to_depth(const Tensor5& in);

/// (B, S³C, Z, Y, X) -> (B, C, SZ, SY, SX). Output (c, Sz+dz, Sy+dy, Sx+dx)
/// reads input channel c*S³ + dz*S² + dy*S + dx. Inverse of space_to_depth at S = 2.
Tensor5 depth_to_space(const Tensor5& in, std::int64_t factor);

/// Halve every spatial dim, keep C: interval sampling, 1x1x1 conv 8C -> C, batch norm.
Tensor5 patch_merge3d(const Tensor5& in, const ConvParams& reduce, const BatchNormParams& bn, int threads = 0);

/// Enlarge every spatial dim by `factor`, keep C: conv C -> S³C, then depth_to_space.
Tensor5 patch_expand3d(const Tensor5& in, std::int64_t factor, const ConvParams& expand, int threads = 0);

/// Channel concatenation of tensors sharing (B, Z, Y, X).
Tensor5 concat_channels(std::span<const Tensor5* const> parts);

} // namespace laminaplan::nn
