#pragma once

#include <string>
#include <vector>

#include "tio/kernels.hpp"

namespace tio {

struct ConvLayer {
    ConvKernel kernel;
    std::vector<float> bias;
};

// Response-map decoder. The analytic variant is training-free and fully
// deterministic; the learned variant runs loadable conv stacks per branch.
struct DecodingHead {
    enum class Variant { reference_analytic, learned_conv };

    Variant variant = Variant::reference_analytic;
    std::vector<ConvLayer> cls_layers;  // must end with 2 output channels
    std::vector<ConvLayer> cen_layers;  // must end with 1
    std::vector<ConvLayer> reg_layers;  // must end with 4

    static DecodingHead analytic() { return DecodingHead{}; }
};

// "HD1" weight container: magic "HD1\0", u32le branch count, then per
// branch: u32le name length + bytes, u32le layer count, and per layer four
// u32le kernel dims (out, kh, kw, in) followed by f32le weights then
// biases. Branch names are "cls", "cen", "reg".
DecodingHead load_head_file(const std::string& path);
void save_head_file(const std::string& path, const DecodingHead& head);

}  // namespace tio
