#include "laminaplan/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "laminaplan/error.hpp"

namespace laminaplan::io {

namespace {

constexpr std::uint8_t kVersion = 0x01;

template <typename U>
void put_le(Bytes& out, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename U>
U get_le(const std::uint8_t* p) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
    return v;
}

} // namespace

void ByteWriter::u16(std::uint16_t v) { put_le(bytes_, v); }
void ByteWriter::u32(std::uint32_t v) { put_le(bytes_, v); }
void ByteWriter::f32(float v) { put_le(bytes_, std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { put_le(bytes_, std::bit_cast<std::uint64_t>(v)); }

void ByteReader::need(std::size_t n) const {
    if (remaining() < n)
        throw Error(ErrorCode::LoadError,
                    what_ + ": truncated (needed " + std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
                        ", " + std::to_string(remaining()) + " left)");
}

void ByteReader::expect_magic(std::string_view m) {
    need(m.size());
    if (std::memcmp(data_.data() + pos_, m.data(), m.size()) != 0)
        throw Error(ErrorCode::LoadError, what_ + ": bad magic, expected \"" + std::string(m) + "\"");
    pos_ += m.size();
    const std::uint8_t version = u8();
    if (version != kVersion)
        throw Error(ErrorCode::LoadError, what_ + ": unsupported version " + std::to_string(version));
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
    need(2);
    const auto v = get_le<std::uint16_t>(data_.data() + pos_);
    pos_ += 2;
    return v;
}

std::uint32_t ByteReader::u32() {
    need(4);
    const auto v = get_le<std::uint32_t>(data_.data() + pos_);
    pos_ += 4;
    return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() {
    need(8);
    const auto v = get_le<std::uint64_t>(data_.data() + pos_);
    pos_ += 8;
    return std::bit_cast<double>(v);
}

std::string ByteReader::string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
}

void ByteReader::f32_array(std::span<float> out) {
    need(out.size() * 4);
    const std::uint8_t* p = data_.data() + pos_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::bit_cast<float>(get_le<std::uint32_t>(p + 4 * i));
    pos_ += out.size() * 4;
}

void ByteReader::expect_end() const {
    if (remaining() != 0)
        throw Error(ErrorCode::LoadError, what_ + ": " + std::to_string(remaining()) + " trailing bytes");
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open file for reading", path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::Io, "read failed", path.string());
    return data;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot open file for writing", path.string());
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorCode::Io, "write failed", path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, "rename failed: " + ec.message(), path.string());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Bytes encode_rvol(const Volume& vol) {
    const Dims3& d = vol.dims();
    ByteWriter w;
    w.magic("RVOL");
    w.u8(kVersion);
    w.u32(static_cast<std::uint32_t>(d.nz));
    w.u32(static_cast<std::uint32_t>(d.ny));
    w.u32(static_cast<std::uint32_t>(d.nx));
    w.f64(vol.spacing().x);
    w.f64(vol.spacing().y);
    w.f64(vol.spacing().z);
    w.f64(vol.origin().x);
    w.f64(vol.origin().y);
    w.f64(vol.origin().z);
    for (float v : vol.voxels()) w.f32(v);
    return w.take();
}

Volume decode_rvol(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, "RVOL");
    r.expect_magic("RVOL");
    Geometry g;
    g.dims.nz = r.u32();
    g.dims.ny = r.u32();
    g.dims.nx = r.u32();
    g.spacing.x = r.f64();
    g.spacing.y = r.f64();
    g.spacing.z = r.f64();
    g.origin.x = r.f64();
    g.origin.y = r.f64();
    g.origin.z = r.f64();
    try {
        g.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::LoadError, std::string("RVOL: invalid header: ") + e.what(), e.context());
    }
    std::vector<float> voxels(static_cast<std::size_t>(g.dims.count()));
    r.f32_array(voxels);
    r.expect_end();
    return Volume(g, std::move(voxels));
}

Volume read_rvol(const std::filesystem::path& path) {
    try {
        return decode_rvol(read_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::LoadError) throw Error(e.code(), e.what(), path.string());
        throw;
    }
}

void write_rvol(const std::filesystem::path& path, const Volume& vol) { write_file_atomic(path, encode_rvol(vol)); }

Bytes encode_rten(const RawTensor& t) {
    std::size_t n = 1;
    for (auto d : t.shape) n *= d;
    if (n != t.data.size() || t.shape.size() > 255)
        throw Error(ErrorCode::ShapeMismatch, "RTEN: payload length does not match shape");
    ByteWriter w;
    w.magic("RTEN");
    w.u8(kVersion);
    w.u8(static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) w.u32(d);
    for (float v : t.data) w.f32(v);
    return w.take();
}

RawTensor decode_rten(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, "RTEN");
    r.expect_magic("RTEN");
    RawTensor t;
    const std::uint8_t rank = r.u8();
    std::uint64_t n = 1;
    for (std::uint8_t i = 0; i < rank; ++i) {
        t.shape.push_back(r.u32());
        n *= t.shape.back();
    }
    if (n * 4 != r.remaining())
        throw Error(ErrorCode::LoadError, "RTEN: payload size " + std::to_string(r.remaining()) +
                                              " bytes does not match shape (" + std::to_string(n * 4) + " expected)");
    t.data.resize(static_cast<std::size_t>(n));
    r.f32_array(t.data);
    return t;
}

RawTensor read_rten(const std::filesystem::path& path) {
    try {
        return decode_rten(read_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::LoadError) throw Error(e.code(), e.what(), path.string());
        throw;
    }
}

void write_rten(const std::filesystem::path& path, const RawTensor& t) { write_file_atomic(path, encode_rten(t)); }

} // namespace laminaplan::io
