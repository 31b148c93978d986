#include "laminaplan/layers.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>
#include <string>

#include "laminaplan/error.hpp"

namespace laminaplan::nn {

std::string shape_string(const std::array<std::int64_t, 5>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
    return s + ")";
}

namespace {

constexpr std::int64_t kOutBlock = 8; // output channels per register block
constexpr std::int64_t kXBlock = 8;   // x positions per register block

int thread_count(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

/// Zero-padded copy, each spatial dim grown by 2*pad.
Tensor5 pad_spatial(const Tensor5& in, std::int64_t pad) {
    const std::int64_t Z = in.depth(), Y = in.height(), X = in.width();
    Tensor5 out(in.batch(), in.channels(), Z + 2 * pad, Y + 2 * pad, X + 2 * pad);
    for (std::int64_t b = 0; b < in.batch(); ++b)
        for (std::int64_t c = 0; c < in.channels(); ++c)
            for (std::int64_t z = 0; z < Z; ++z)
                for (std::int64_t y = 0; y < Y; ++y) {
                    const float* src = &in.data[in.offset(b, c, z, y, 0)];
                    std::copy(src, src + X, &out.data[out.offset(b, c, z + pad, y + pad, pad)]);
                }
    return out;
}

/// One register block: OUT output channels x W positions of a single output row.
/// Accumulation order per value is (ic, dz, dy, dx), identical for every W.
template <std::int64_t W>
inline void conv_row_block(const float* padded, std::int64_t in_c, std::int64_t k, std::int64_t plane,
                           std::int64_t row_stride, std::int64_t channel_stride, const float* wblock,
                           const float* bias, float (&acc)[kOutBlock][kXBlock]) {
    for (std::int64_t o = 0; o < kOutBlock; ++o)
        for (std::int64_t xi = 0; xi < W; ++xi) acc[o][xi] = bias[o];
    const std::int64_t taps = k * k * k;
    for (std::int64_t ic = 0; ic < in_c; ++ic) {
        const float* cbase = padded + ic * channel_stride;
        const float* wic = wblock + ic * taps * kOutBlock;
        for (std::int64_t dz = 0; dz < k; ++dz)
            for (std::int64_t dy = 0; dy < k; ++dy) {
                const float* row = cbase + dz * plane + dy * row_stride;
                const float* wrow = wic + (dz * k + dy) * k * kOutBlock;
                for (std::int64_t dx = 0; dx < k; ++dx) {
                    const float* src = row + dx;
                    const float* wv = wrow + dx * kOutBlock;
                    for (std::int64_t o = 0; o < kOutBlock; ++o) {
                        const float w = wv[o];
                        for (std::int64_t xi = 0; xi < W; ++xi) acc[o][xi] += w * src[xi];
                    }
                }
            }
    }
}

} // namespace

Tensor5 conv3d(const Tensor5& in, const ConvParams& conv, int threads) {
    const std::int64_t k = conv.kernel;
    if (k < 1 || k % 2 == 0) throw Error(ErrorCode::InvalidParameter, "conv3d kernel size must be odd, got " + std::to_string(k));
    if (conv.in_channels != in.channels())
        throw Error(ErrorCode::ShapeMismatch, "conv3d expects " + std::to_string(conv.in_channels) +
                                                  " input channels, tensor has " + std::to_string(in.channels()));
    const std::int64_t taps = k * k * k;
    if (static_cast<std::int64_t>(conv.weight.size()) != conv.out_channels * conv.in_channels * taps ||
        static_cast<std::int64_t>(conv.bias.size()) != conv.out_channels)
        throw Error(ErrorCode::ShapeMismatch, "conv3d weight/bias sizes do not match the declared shape");

    const std::int64_t pad = k / 2;
    const std::int64_t B = in.batch(), C = in.channels(), OC = conv.out_channels;
    const std::int64_t Z = in.depth(), Y = in.height(), X = in.width();
    Tensor5 out(B, OC, Z, Y, X);
    if (out.size() == 0) return out;

    const Tensor5 padded_storage = pad > 0 ? pad_spatial(in, pad) : Tensor5{};
    const Tensor5& padded = pad > 0 ? padded_storage : in;
    const std::int64_t PY = Y + 2 * pad, PX = X + 2 * pad;
    const std::int64_t plane = PY * PX;
    const std::int64_t channel_stride = (Z + 2 * pad) * plane;

    // Repack weights as [block][ic][tap][o] with zero rows for the partial final block.
    const std::int64_t blocks = (OC + kOutBlock - 1) / kOutBlock;
    std::vector<float> wpack(static_cast<std::size_t>(blocks * C * taps * kOutBlock), 0.0f);
    std::vector<float> bpack(static_cast<std::size_t>(blocks * kOutBlock), 0.0f);
    for (std::int64_t oc = 0; oc < OC; ++oc) {
        const std::int64_t blk = oc / kOutBlock, o = oc % kOutBlock;
        bpack[static_cast<std::size_t>(blk * kOutBlock + o)] = conv.bias[static_cast<std::size_t>(oc)];
        for (std::int64_t ic = 0; ic < C; ++ic)
            for (std::int64_t t = 0; t < taps; ++t)
                wpack[static_cast<std::size_t>(((blk * C + ic) * taps + t) * kOutBlock + o)] =
                    conv.weight[static_cast<std::size_t>((oc * C + ic) * taps + t)];
    }

    const std::int64_t jobs = B * blocks * Z;
#pragma omp parallel for schedule(static) num_threads(thread_count(threads))
    for (std::int64_t job = 0; job < jobs; ++job) {
        const std::int64_t z = job % Z;
        const std::int64_t blk = (job / Z) % blocks;
        const std::int64_t b = job / (Z * blocks);
        const float* wblock = &wpack[static_cast<std::size_t>(blk * C * taps * kOutBlock)];
        const float* bias = &bpack[static_cast<std::size_t>(blk * kOutBlock)];
        const std::int64_t oc0 = blk * kOutBlock;
        const std::int64_t valid = std::min(kOutBlock, OC - oc0);
        float acc[kOutBlock][kXBlock];
        for (std::int64_t y = 0; y < Y; ++y) {
            const float* base = &padded.data[padded.offset(b, 0, z, y, 0)];
            std::int64_t x0 = 0;
            const auto store = [&](std::int64_t width) {
                for (std::int64_t o = 0; o < valid; ++o) {
                    float* dst = &out.data[out.offset(b, oc0 + o, z, y, x0)];
                    for (std::int64_t xi = 0; xi < width; ++xi) dst[xi] = acc[o][xi];
                }
            };
            for (; x0 + kXBlock <= X; x0 += kXBlock) {
                conv_row_block<kXBlock>(base + x0, C, k, plane, PX, channel_stride, wblock, bias, acc);
                store(kXBlock);
            }
            for (; x0 < X; ++x0) {
                conv_row_block<1>(base + x0, C, k, plane, PX, channel_stride, wblock, bias, acc);
                store(1);
            }
        }
    }
    return out;
}

Tensor5 batchnorm3d(const Tensor5& in, const BatchNormParams& bn) {
    const auto C = static_cast<std::size_t>(in.channels());
    if (bn.scale.size() != C || bn.shift.size() != C || bn.mean.size() != C || bn.var.size() != C)
        throw Error(ErrorCode::ShapeMismatch, "batchnorm3d parameters must have one entry per channel (" + std::to_string(C) + ")");
    std::vector<float> mul(C), add(C);
    for (std::size_t c = 0; c < C; ++c) {
        const double denom = static_cast<double>(bn.var[c]) + bn.eps;
        if (!(denom > 0.0))
            throw Error(ErrorCode::InvalidParameter, "batchnorm3d requires var + eps > 0 (channel " + std::to_string(c) + ")");
        const double a = static_cast<double>(bn.scale[c]) / std::sqrt(denom);
        mul[c] = static_cast<float>(a);
        add[c] = static_cast<float>(static_cast<double>(bn.shift[c]) - static_cast<double>(bn.mean[c]) * a);
    }
    Tensor5 out = in;
    const std::int64_t S = in.spatial();
    const std::int64_t planes = in.batch() * in.channels();
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < planes; ++p) {
        const auto c = static_cast<std::size_t>(p % in.channels());
        float* v = out.data.data() + p * S;
        const float m = mul[c], a = add[c];
        for (std::int64_t i = 0; i < S; ++i) v[i] = v[i] * m + a;
    }
    return out;
}

void relu_inplace(Tensor5& t) {
    for (float& v : t.data) v = v > 0.0f ? v : 0.0f;
}

Tensor5 space_to_depth(const Tensor5& in) {
    const std::int64_t Z = in.depth(), Y = in.height(), X = in.width();
    if (Z % 2 || Y % 2 || X % 2)
        throw Error(ErrorCode::EvenDimsRequired, "patch merging needs even spatial dims, got " + shape_string(in.shape));
    Tensor5 out(in.batch(), in.channels() * 8, Z / 2, Y / 2, X / 2);
    for (std::int64_t b = 0; b < in.batch(); ++b)
        for (std::int64_t c = 0; c < in.channels(); ++c)
            for (std::int64_t dz = 0; dz < 2; ++dz)
                for (std::int64_t dy = 0; dy < 2; ++dy)
                    for (std::int64_t dx = 0; dx < 2; ++dx) {
                        const std::int64_t oc = c * 8 + dz * 4 + dy * 2 + dx;
                        for (std::int64_t z = 0; z < Z / 2; ++z)
                            for (std::int64_t y = 0; y < Y / 2; ++y)
                                for (std::int64_t x = 0; x < X / 2; ++x)
                                    out.at(b, oc, z, y, x) = in.at(b, c, 2 * z + dz, 2 * y + dy, 2 * x + dx);
                    }
    return out;
}

Tensor5 depth_to_space(const Tensor5& in, std::int64_t factor) {
    if (factor < 1) throw Error(ErrorCode::InvalidParameter, "patch expanding factor must be >= 1");
    const std::int64_t s3 = factor * factor * factor;
    if (in.channels() % s3 != 0)
        throw Error(ErrorCode::ShapeMismatch, "channel count " + std::to_string(in.channels()) +
                                                  " is not divisible by S^3 = " + std::to_string(s3));
    const std::int64_t C = in.channels() / s3;
    const std::int64_t Z = in.depth(), Y = in.height(), X = in.width();
    Tensor5 out(in.batch(), C, Z * factor, Y * factor, X * factor);
    for (std::int64_t b = 0; b < in.batch(); ++b)
        for (std::int64_t c = 0; c < C; ++c)
            for (std::int64_t dz = 0; dz < factor; ++dz)
                for (std::int64_t dy = 0; dy < factor; ++dy)
                    for (std::int64_t dx = 0; dx < factor; ++dx) {
                        const std::int64_t ic = c * s3 + (dz * factor + dy) * factor + dx;
                        for (std::int64_t z = 0; z < Z; ++z)
                            for (std::int64_t y = 0; y < Y; ++y) {
                                const float* src = &in.data[in.offset(b, ic, z, y, 0)];
                                float* dst = &out.data[out.offset(b, c, factor * z + dz, factor * y + dy, dx)];
                                for (std::int64_t x = 0; x < X; ++x) dst[x * factor] = src[x];
                            }
                    }
    return out;
}

Tensor5 patch_merge3d(const Tensor5& in, const ConvParams& reduce, const BatchNormParams& bn, int threads) {
    const Tensor5 stacked = space_to_depth(in);
    return batchnorm3d(conv3d(stacked, reduce, threads), bn);
}

Tensor5 patch_expand3d(const Tensor5& in, std::int64_t factor, const ConvParams& expand, int threads) {
    if (factor < 1) throw Error(ErrorCode::InvalidParameter, "patch expanding factor must be >= 1");
    const std::int64_t s3 = factor * factor * factor;
    if (expand.out_channels != s3 * in.channels())
        throw Error(ErrorCode::ShapeMismatch, "patch expanding conv must produce S^3 * C = " + std::to_string(s3 * in.channels()) +
                                                  " channels, has " + std::to_string(expand.out_channels));
    return depth_to_space(conv3d(in, expand, threads), factor);
}

Tensor5 concat_channels(std::span<const Tensor5* const> parts) {
    if (parts.empty()) throw Error(ErrorCode::EmptyInput, "concat_channels needs at least one tensor");
    const Tensor5& first = *parts.front();
    std::int64_t C = 0;
    for (const Tensor5* p : parts) {
        if (p->batch() != first.batch() || p->depth() != first.depth() || p->height() != first.height() ||
            p->width() != first.width())
            throw Error(ErrorCode::ShapeMismatch, "concat_channels: " + shape_string(p->shape) + " does not match " +
                                                      shape_string(first.shape));
        C += p->channels();
    }
    Tensor5 out(first.batch(), C, first.depth(), first.height(), first.width());
    const std::int64_t S = first.spatial();
    for (std::int64_t b = 0; b < first.batch(); ++b) {
        std::int64_t c0 = 0;
        for (const Tensor5* p : parts) {
            const float* src = &p->data[p->offset(b, 0, 0, 0, 0)];
            std::copy(src, src + p->channels() * S, &out.data[out.offset(b, c0, 0, 0, 0)]);
            c0 += p->channels();
        }
    }
    return out;
}

} // namespace laminaplan::nn
