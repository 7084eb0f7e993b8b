#include "tio/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tio {

Tensor3::Tensor3(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
    if (height < 1 || width < 1 || channels < 1) {
        throw ShapeError("Tensor3 dims must be >= 1, got " + std::to_string(height) +
                         "x" + std::to_string(width) + "x" + std::to_string(channels));
    }
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Tensor3::Tensor3(int height, int width, int channels, std::vector<float> values)
    : height_(height), width_(width), channels_(channels), data_(std::move(values)) {
    if (height < 1 || width < 1 || channels < 1) {
        throw ShapeError("Tensor3 dims must be >= 1");
    }
    if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
        throw ShapeError("Tensor3 data length " + std::to_string(data_.size()) +
                         " does not match dims " + std::to_string(height) + "x" +
                         std::to_string(width) + "x" + std::to_string(channels));
    }
}

bool Tensor3::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace {

constexpr char kFt1Magic[4] = {'F', 'T', '1', '\0'};

void put_u32le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw ParseError("FT1: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_ft1(std::ostream& out, const Tensor3& t) {
    out.write(kFt1Magic, 4);
    put_u32le(out, static_cast<std::uint32_t>(t.height()));
    put_u32le(out, static_cast<std::uint32_t>(t.width()));
    put_u32le(out, static_cast<std::uint32_t>(t.channels()));
    static_assert(sizeof(float) == 4);
    // Values are IEEE-754 f32; on little-endian hosts the in-memory layout
    // is already the wire layout.
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!out) throw Error("FT1: write failed");
}

void write_ft1_file(const std::string& path, const Tensor3& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("FT1: cannot open for write: " + path);
    write_ft1(f, t);
}

Tensor3 read_ft1(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kFt1Magic, 4) != 0) {
        throw ParseError("FT1: bad magic");
    }
    const std::uint32_t h = get_u32le(in);
    const std::uint32_t w = get_u32le(in);
    const std::uint32_t c = get_u32le(in);
    if (h < 1 || w < 1 || c < 1 || static_cast<std::uint64_t>(h) * w * c > (1ull << 31)) {
        throw ParseError("FT1: implausible dims");
    }
    std::vector<float> values(static_cast<std::size_t>(h) * w * c);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
    if (!in) throw ParseError("FT1: truncated payload");
    return Tensor3(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c),
                   std::move(values));
}

Tensor3 read_ft1_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("FT1: cannot open: " + path);
    return read_ft1(f);
}

}  // namespace tio
