#include "tio/head.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace tio {

namespace {

constexpr char kHd1Magic[4] = {'H', 'D', '1', '\0'};

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
    if (!in) throw ParseError("HD1: truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_floats(std::ostream& out, const std::vector<float>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
}

std::vector<float> read_floats(std::istream& in, std::size_t n) {
    std::vector<float> v(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (!in) throw ParseError("HD1: truncated weights");
    return v;
}

void write_branch(std::ostream& out, const std::string& name,
                  const std::vector<ConvLayer>& layers) {
    put_u32le(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32le(out, static_cast<std::uint32_t>(layers.size()));
    for (const auto& layer : layers) {
        put_u32le(out, static_cast<std::uint32_t>(layer.kernel.out_channels));
        put_u32le(out, static_cast<std::uint32_t>(layer.kernel.kh));
        put_u32le(out, static_cast<std::uint32_t>(layer.kernel.kw));
        put_u32le(out, static_cast<std::uint32_t>(layer.kernel.in_channels));
        write_floats(out, layer.kernel.weights);
        write_floats(out, layer.bias);
    }
}

std::vector<ConvLayer> read_branch_layers(std::istream& in) {
    const std::uint32_t layer_count = get_u32le(in);
    if (layer_count > 64) throw ParseError("HD1: implausible layer count");
    std::vector<ConvLayer> layers;
    layers.reserve(layer_count);
    for (std::uint32_t li = 0; li < layer_count; ++li) {
        ConvLayer layer;
        layer.kernel.out_channels = static_cast<int>(get_u32le(in));
        layer.kernel.kh = static_cast<int>(get_u32le(in));
        layer.kernel.kw = static_cast<int>(get_u32le(in));
        layer.kernel.in_channels = static_cast<int>(get_u32le(in));
        if (layer.kernel.out_channels < 1 || layer.kernel.in_channels < 1 ||
            layer.kernel.kh < 1 || layer.kernel.kw < 1 ||
            layer.kernel.expected_size() > (1u << 28)) {
            throw ParseError("HD1: implausible kernel dims");
        }
        layer.kernel.weights = read_floats(in, layer.kernel.expected_size());
        layer.bias = read_floats(in, static_cast<std::size_t>(layer.kernel.out_channels));
        layers.push_back(std::move(layer));
    }
    return layers;
}

}  // namespace

DecodingHead load_head_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("HD1: cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kHd1Magic, 4) != 0) throw ParseError("HD1: bad magic");

    DecodingHead head;
    head.variant = DecodingHead::Variant::learned_conv;
    const std::uint32_t branches = get_u32le(in);
    if (branches > 16) throw ParseError("HD1: implausible branch count");
    for (std::uint32_t b = 0; b < branches; ++b) {
        const std::uint32_t name_len = get_u32le(in);
        if (name_len > 256) throw ParseError("HD1: implausible branch name length");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        if (!in) throw ParseError("HD1: truncated branch name");
        auto layers = read_branch_layers(in);
        if (name == "cls") head.cls_layers = std::move(layers);
        else if (name == "cen") head.cen_layers = std::move(layers);
        else if (name == "reg") head.reg_layers = std::move(layers);
        else throw ParseError("HD1: unknown branch name: " + name);
    }
    if (head.cls_layers.empty() || head.cen_layers.empty() || head.reg_layers.empty()) {
        throw ParseError("HD1: missing cls/cen/reg branch");
    }
    return head;
}

void save_head_file(const std::string& path, const DecodingHead& head) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("HD1: cannot open for write: " + path);
    out.write(kHd1Magic, 4);
    put_u32le(out, 3);
    write_branch(out, "cls", head.cls_layers);
    write_branch(out, "cen", head.cen_layers);
    write_branch(out, "reg", head.reg_layers);
    if (!out) throw Error("HD1: write failed");
}

}  // namespace tio
