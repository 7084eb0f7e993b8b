#include "tio/reference.hpp"

#include <cmath>

namespace tio {

float ref_bilinear(const Tensor3& t, double x, double y, int c) {
    if (x < -1.0 || x > t.width() || y < -1.0 || y > t.height()) return 0.0f;
    const double x0 = std::floor(x);
    const double y0 = std::floor(y);
    double acc = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
        for (int dx = 0; dx <= 1; ++dx) {
            const int xi = static_cast<int>(x0) + dx;
            const int yi = static_cast<int>(y0) + dy;
            const double wx = 1.0 - std::abs(x - xi);
            const double wy = 1.0 - std::abs(y - yi);
            double v = 0.0;
            if (xi >= 0 && xi < t.width() && yi >= 0 && yi < t.height()) {
                v = t.at(yi, xi, c);
            }
            acc += wx * wy * v;
        }
    }
    return static_cast<float>(acc);
}

Tensor3 ref_roi_align(const Tensor3& feature, const Box& box, int out_h, int out_w,
                      int samples_per_axis) {
    Tensor3 out(out_h, out_w, feature.channels());
    const double cell_h = box.h / out_h;
    const double cell_w = box.w / out_w;
    for (int c = 0; c < feature.channels(); ++c) {
        for (int i = 0; i < out_h; ++i) {
            for (int j = 0; j < out_w; ++j) {
                const double cell_y = box.y + i * cell_h;
                const double cell_x = box.x + j * cell_w;
                double acc = 0.0;
                for (int sy = 0; sy < samples_per_axis; ++sy) {
                    for (int sx = 0; sx < samples_per_axis; ++sx) {
                        const double y = cell_y + cell_h * (2.0 * sy + 1.0) /
                                                      (2.0 * samples_per_axis);
                        const double x = cell_x + cell_w * (2.0 * sx + 1.0) /
                                                      (2.0 * samples_per_axis);
                        acc += ref_bilinear(feature, x, y, c);
                    }
                }
                out.at(i, j, c) =
                    static_cast<float>(acc / (samples_per_axis * samples_per_axis));
            }
        }
    }
    return out;
}

Tensor3 ref_depthwise_xcorr(const Tensor3& search, const Tensor3& tmpl) {
    const int oh = search.height() - tmpl.height() + 1;
    const int ow = search.width() - tmpl.width() + 1;
    Tensor3 out(oh, ow, search.channels());
    for (int c = 0; c < search.channels(); ++c) {
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                double acc = 0.0;
                for (int u = 0; u < tmpl.height(); ++u) {
                    for (int v = 0; v < tmpl.width(); ++v) {
                        acc += static_cast<double>(tmpl.at(u, v, c)) *
                               search.at(i + u, j + v, c);
                    }
                }
                out.at(i, j, c) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

Tensor3 ref_conv2d(const Tensor3& input, const ConvKernel& kernel,
                   const std::vector<float>& bias, int padding) {
    const int oh = input.height() + 2 * padding - kernel.kh + 1;
    const int ow = input.width() + 2 * padding - kernel.kw + 1;
    Tensor3 out(oh, ow, kernel.out_channels);
    auto padded = [&](int y, int x, int c) -> double {
        if (y < 0 || y >= input.height() || x < 0 || x >= input.width()) return 0.0;
        return input.at(y, x, c);
    };
    for (int oc = 0; oc < kernel.out_channels; ++oc) {
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                double acc = bias[static_cast<std::size_t>(oc)];
                for (int ic = 0; ic < kernel.in_channels; ++ic) {
                    for (int ky = 0; ky < kernel.kh; ++ky) {
                        for (int kx = 0; kx < kernel.kw; ++kx) {
                            acc += static_cast<double>(kernel.at(oc, ky, kx, ic)) *
                                   padded(i + ky - padding, j + kx - padding, ic);
                        }
                    }
                }
                out.at(i, j, oc) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

}  // namespace tio
