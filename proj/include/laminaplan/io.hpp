#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "laminaplan/volume.hpp"

namespace laminaplan::io {

using Bytes = std::vector<std::uint8_t>;

/// Little-endian byte sink.
class ByteWriter {
public:
    void raw(std::span<const std::uint8_t> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }
    void magic(std::string_view m) { for (char c : m) bytes_.push_back(static_cast<std::uint8_t>(c)); }
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void f32(float v);
    void f64(double v);

    const Bytes& bytes() const { return bytes_; }
    Bytes take() { return std::move(bytes_); }

private:
    Bytes bytes_;
};

/// Little-endian byte source; every read is bounds-checked and throws LoadError on truncation.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> data, std::string what) : data_(data), what_(std::move(what)) {}

    void expect_magic(std::string_view m);
    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    float f32();
    double f64();
    std::string string(std::size_t n);
    void f32_array(std::span<float> out);

    std::size_t remaining() const { return data_.size() - pos_; }
    void expect_end() const;

private:
    void need(std::size_t n) const;

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    std::string what_;
};

Bytes read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling then renames, so a failed write leaves no partial file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

// RVOL: "RVOL", version 0x01, nz ny nx (u32), sx sy sz ox oy oz (f64), voxels (f32).
Bytes encode_rvol(const Volume& vol);
Volume decode_rvol(std::span<const std::uint8_t> bytes);
Volume read_rvol(const std::filesystem::path& path);
void write_rvol(const std::filesystem::path& path, const Volume& vol);

/// Dense float32 tensor as stored in an RTEN file.
struct RawTensor {
    std::vector<std::uint32_t> shape;
    std::vector<float> data;

    bool operator==(const RawTensor&) const = default;
};

// RTEN: "RTEN", version 0x01, rank (u8), dims (u32 each), C-order f32 payload.
Bytes encode_rten(const RawTensor& t);
RawTensor decode_rten(std::span<const std::uint8_t> bytes);
RawTensor read_rten(const std::filesystem::path& path);
void write_rten(const std::filesystem::path& path, const RawTensor& t);

} // namespace laminaplan::io
