#include "tio/kernels.hpp"

#include <cmath>
#include <string>

namespace tio {

float bilinear_sample(const Tensor3& t, double x, double y, int c) {
    if (c < 0 || c >= t.channels()) {
        throw PreconditionError("bilinear_sample: channel " + std::to_string(c) +
                                " out of range");
    }
    const int h = t.height();
    const int w = t.width();
    if (!(x >= -1.0 && x <= static_cast<double>(w) && y >= -1.0 &&
          y <= static_cast<double>(h))) {
        return 0.0f;
    }

    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = x0 + 1;
    const int y1 = y0 + 1;
    const double fx = x - x0;
    const double fy = y - y0;

    auto value = [&](int yy, int xx) -> double {
        if (yy < 0 || yy >= h || xx < 0 || xx >= w) return 0.0;
        return t.at(yy, xx, c);
    };

    const double top = (1.0 - fx) * value(y0, x0) + fx * value(y0, x1);
    const double bot = (1.0 - fx) * value(y1, x0) + fx * value(y1, x1);
    return static_cast<float>((1.0 - fy) * top + fy * bot);
}

Tensor3 roi_align(const Tensor3& feature, const Box& box, int out_h, int out_w,
                  int samples_per_axis) {
    if (!(box.w > 0.0) || !(box.h > 0.0)) {
        throw DegenerateBoxError("roi_align: box extent must be positive");
    }
    if (out_h < 1 || out_w < 1 || samples_per_axis < 1) {
        throw PreconditionError("roi_align: output dims and sample count must be >= 1");
    }

    const int n = samples_per_axis;
    const double bin_h = box.h / out_h;
    const double bin_w = box.w / out_w;
    Tensor3 out(out_h, out_w, feature.channels());

    for (int i = 0; i < out_h; ++i) {
        for (int j = 0; j < out_w; ++j) {
            for (int c = 0; c < feature.channels(); ++c) {
                double acc = 0.0;
                for (int sy = 0; sy < n; ++sy) {
                    const double y = box.y + (i + (sy + 0.5) / n) * bin_h;
                    for (int sx = 0; sx < n; ++sx) {
                        const double x = box.x + (j + (sx + 0.5) / n) * bin_w;
                        acc += bilinear_sample(feature, x, y, c);
                    }
                }
                out.at(i, j, c) = static_cast<float>(acc / (n * n));
            }
        }
    }
    return out;
}

Tensor3 depthwise_xcorr(const Tensor3& search, const Tensor3& tmpl) {
    if (search.channels() != tmpl.channels()) {
        throw ShapeError("depthwise_xcorr: channel mismatch (" +
                         std::to_string(search.channels()) + " vs " +
                         std::to_string(tmpl.channels()) + ")");
    }
    if (tmpl.height() > search.height() || tmpl.width() > search.width()) {
        throw ShapeError("depthwise_xcorr: template larger than search region");
    }

    const int oh = search.height() - tmpl.height() + 1;
    const int ow = search.width() - tmpl.width() + 1;
    const int ch = search.channels();
    Tensor3 out(oh, ow, ch);

    std::vector<double> acc(static_cast<std::size_t>(ch));
    for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int u = 0; u < tmpl.height(); ++u) {
                const float* trow = &tmpl.data()[tmpl.index(u, 0, 0)];
                const float* srow = &search.data()[search.index(i + u, j, 0)];
                // Channel-innermost layout keeps both rows contiguous.
                int k = 0;
                for (int v = 0; v < tmpl.width(); ++v) {
                    for (int c = 0; c < ch; ++c, ++k) {
                        acc[c] += static_cast<double>(trow[k]) * srow[k];
                    }
                }
            }
            for (int c = 0; c < ch; ++c) {
                out.at(i, j, c) = static_cast<float>(acc[c]);
            }
        }
    }
    return out;
}

Tensor3 conv2d(const Tensor3& input, const ConvKernel& kernel,
               const std::vector<float>& bias, int padding) {
    if (kernel.in_channels != input.channels()) {
        throw ShapeError("conv2d: kernel expects " + std::to_string(kernel.in_channels) +
                         " input channels, tensor has " +
                         std::to_string(input.channels()));
    }
    if (kernel.kh % 2 == 0 || kernel.kw % 2 == 0 || kernel.kh < 1 || kernel.kw < 1) {
        throw PreconditionError("conv2d: kernel spatial dims must be odd");
    }
    if (kernel.weights.size() != kernel.expected_size()) {
        throw ShapeError("conv2d: weight block size mismatch");
    }
    if (bias.size() != static_cast<std::size_t>(kernel.out_channels)) {
        throw ShapeError("conv2d: bias length must equal output channel count");
    }
    if (padding < 0) throw PreconditionError("conv2d: padding must be >= 0");

    const int oh = input.height() + 2 * padding - kernel.kh + 1;
    const int ow = input.width() + 2 * padding - kernel.kw + 1;
    if (oh < 1 || ow < 1) {
        throw ShapeError("conv2d: kernel larger than padded input");
    }

    Tensor3 out(oh, ow, kernel.out_channels);
    for (int i = 0; i < oh; ++i) {
        for (int j = 0; j < ow; ++j) {
            for (int oc = 0; oc < kernel.out_channels; ++oc) {
                double acc = bias[oc];
                for (int ky = 0; ky < kernel.kh; ++ky) {
                    const int y = i + ky - padding;
                    if (y < 0 || y >= input.height()) continue;
                    for (int kx = 0; kx < kernel.kw; ++kx) {
                        const int x = j + kx - padding;
                        if (x < 0 || x >= input.width()) continue;
                        for (int ic = 0; ic < input.channels(); ++ic) {
                            acc += static_cast<double>(kernel.at(oc, ky, kx, ic)) *
                                   input.at(y, x, ic);
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
