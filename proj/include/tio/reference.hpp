#pragma once

#include "tio/kernels.hpp"

namespace tio {

// Plain scalar-loop reference kernels. These intentionally share no code
// with the production kernels; they exist to cross-check them (selftest,
// test suites) and as executable documentation of the semantics.

float ref_bilinear(const Tensor3& t, double x, double y, int c);

Tensor3 ref_roi_align(const Tensor3& feature, const Box& box, int out_h, int out_w,
                      int samples_per_axis);

Tensor3 ref_depthwise_xcorr(const Tensor3& search, const Tensor3& tmpl);

Tensor3 ref_conv2d(const Tensor3& input, const ConvKernel& kernel,
                   const std::vector<float>& bias, int padding);

}  // namespace tio
