#pragma once

#include <vector>

#include "tio/geometry.hpp"
#include "tio/tensor.hpp"

namespace tio {

// 4-D convolution weight block, [out][ky][kx][in] with channels innermost.
struct ConvKernel {
    int out_channels = 0;
    int kh = 0;
    int kw = 0;
    int in_channels = 0;
    std::vector<float> weights;

    float at(int oc, int ky, int kx, int ic) const {
        return weights[((static_cast<std::size_t>(oc) * kh + ky) * kw + kx) *
                           in_channels +
                       ic];
    }
    std::size_t expected_size() const {
        return static_cast<std::size_t>(out_channels) * kh * kw * in_channels;
    }
};

// Bilinear lookup at continuous (x, y) with pixel (i, j) centered at
// (x=j, y=i). The grid is zero-padded: neighbors outside the map read as 0,
// so values fade to zero across a one-pixel border and anything beyond
// [-1, W] x [-1, H] is exactly 0.
float bilinear_sample(const Tensor3& t, double x, double y, int c);

// ROI align. Output cell (i, j) averages samples_per_axis^2 bilinear samples
// on a regular centered sub-grid of that cell's slice of `box` (given in
// feature coordinates).
Tensor3 roi_align(const Tensor3& feature, const Box& box, int out_h, int out_w,
                  int samples_per_axis = 2);

// Valid-mode per-channel cross-correlation of `tmpl` over `search`:
//   out(i, j, c) = sum_{u,v} tmpl(u, v, c) * search(i+u, j+v, c)
// Output is (Hs-Ht+1) x (Ws-Wt+1) x C.
Tensor3 depthwise_xcorr(const Tensor3& search, const Tensor3& tmpl);

// Zero-padded cross-correlation convolution. Spatial size is preserved when
// padding == (k-1)/2. Kernel spatial dims must be odd.
Tensor3 conv2d(const Tensor3& input, const ConvKernel& kernel,
               const std::vector<float>& bias, int padding);

}  // namespace tio
