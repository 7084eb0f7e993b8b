#include "tio/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "tio/eval.hpp"
#include "tio/losses.hpp"
#include "tio/reference.hpp"
#include "tio/siam_track.hpp"

namespace tio {

namespace {

Tensor3 random_tensor(std::mt19937& rng, int h, int w, int c, float lo = -1.0f,
                      float hi = 1.0f) {
    Tensor3 t(h, w, c);
    std::uniform_real_distribution<float> dist(lo, hi);
    for (float& v : t.data()) v = dist(rng);
    return t;
}

double max_abs_diff(const Tensor3& a, const Tensor3& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
    }
    return worst;
}

bool check_xcorr_oracle(std::mt19937& rng) {
    for (int iter = 0; iter < 50; ++iter) {
        std::uniform_int_distribution<int> dim(1, 12);
        const int th = dim(rng);
        const int tw = dim(rng);
        const int ch = dim(rng);
        const int sh = th + dim(rng);
        const int sw = tw + dim(rng);
        const Tensor3 search = random_tensor(rng, sh, sw, ch);
        const Tensor3 tmpl = random_tensor(rng, th, tw, ch);
        if (max_abs_diff(depthwise_xcorr(search, tmpl), ref_depthwise_xcorr(search, tmpl)) >
            1e-5) {
            return false;
        }
    }
    return true;
}

bool check_roi_align_oracle(std::mt19937& rng) {
    for (int iter = 0; iter < 50; ++iter) {
        std::uniform_int_distribution<int> dim(4, 16);
        const int h = dim(rng);
        const int w = dim(rng);
        const Tensor3 feature = random_tensor(rng, h, w, 3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Box box;
        box.w = 1.0 + u(rng) * (w - 2);
        box.h = 1.0 + u(rng) * (h - 2);
        box.x = u(rng) * (w - box.w) - 0.5;
        box.y = u(rng) * (h - box.h) - 0.5;
        const int oh = 1 + static_cast<int>(u(rng) * 6);
        const int ow = 1 + static_cast<int>(u(rng) * 6);
        if (max_abs_diff(roi_align(feature, box, oh, ow, 2),
                         ref_roi_align(feature, box, oh, ow, 2)) > 1e-5) {
            return false;
        }
    }
    return true;
}

bool check_conv_oracle(std::mt19937& rng) {
    for (int iter = 0; iter < 50; ++iter) {
        std::uniform_int_distribution<int> dim(3, 10);
        std::uniform_int_distribution<int> kdim(0, 1);
        const int h = dim(rng);
        const int w = dim(rng);
        const int ic = 1 + dim(rng) % 4;
        const int oc = 1 + dim(rng) % 4;
        const int k = kdim(rng) * 2 + 1;  // 1 or 3
        const Tensor3 input = random_tensor(rng, h, w, ic);
        ConvKernel kernel{oc, k, k, ic, {}};
        kernel.weights.resize(kernel.expected_size());
        std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
        for (float& v : kernel.weights) v = dist(rng);
        std::vector<float> bias(static_cast<std::size_t>(oc));
        for (float& v : bias) v = dist(rng);
        const int pad = (k - 1) / 2;
        if (max_abs_diff(conv2d(input, kernel, bias, pad),
                         ref_conv2d(input, kernel, bias, pad)) > 1e-5) {
            return false;
        }
    }
    return true;
}

bool check_bilinear_corners() {
    Tensor3 t(2, 2, 1);
    t.at(0, 0, 0) = 0.0f;
    t.at(0, 1, 0) = 1.0f;
    t.at(1, 0, 0) = 2.0f;
    t.at(1, 1, 0) = 3.0f;
    if (std::abs(bilinear_sample(t, 0.5, 0.5, 0) - 1.5f) > 1e-6f) return false;
    if (bilinear_sample(t, 1.0, 1.0, 0) != 3.0f) return false;
    if (bilinear_sample(t, -1.0, 0.0, 0) != 0.0f) return false;
    if (bilinear_sample(t, 5.0, 0.0, 0) != 0.0f) return false;
    Tensor3 c(3, 3, 2, 5.0f);
    return bilinear_sample(c, 1.3, 0.7, 1) == 5.0f;
}

bool check_geometry_roundtrip(std::mt19937& rng) {
    std::uniform_real_distribution<double> pos(-50.0, 50.0);
    std::uniform_real_distribution<double> ext(0.5, 60.0);
    for (int iter = 0; iter < 1000; ++iter) {
        const Box hand{pos(rng), pos(rng), ext(rng), ext(rng)};
        const Box object{pos(rng), pos(rng), ext(rng), ext(rng)};
        const Box back = decode_hand_to_object(hand, encode_hand_to_object(hand, object));
        const double scale = std::max({std::abs(object.x), std::abs(object.y), object.w,
                                       object.h, 1.0});
        if (std::abs(back.x - object.x) > 1e-9 * scale ||
            std::abs(back.y - object.y) > 1e-9 * scale ||
            std::abs(back.w - object.w) > 1e-9 * scale ||
            std::abs(back.h - object.h) > 1e-9 * scale) {
            return false;
        }
    }
    return true;
}

bool gradient_matches(const LossValue& lv, const std::function<double(int, double)>& probe,
                      std::size_t dims, double rel_tol) {
    const double h = 1e-4;
    for (std::size_t k = 0; k < dims; ++k) {
        const double fd = (probe(static_cast<int>(k), h) - probe(static_cast<int>(k), -h)) /
                          (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(lv.gradient[k]), 1.0});
        if (std::abs(fd - lv.gradient[k]) / denom > rel_tol) return false;
    }
    return true;
}

bool check_gradients(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int iter = 0; iter < 25; ++iter) {
        std::vector<double> logits{u(rng), u(rng), u(rng)};
        const std::size_t target = static_cast<std::size_t>(iter % 3);
        const LossValue ce = cross_entropy(logits, target);
        auto ce_probe = [&](int k, double eps) {
            auto shifted = logits;
            shifted[static_cast<std::size_t>(k)] += eps;
            return cross_entropy(shifted, target).value;
        };
        if (!gradient_matches(ce, ce_probe, 3, 1e-4)) return false;

        const double pred = 0.15 + 0.7 * (u(rng) / 2.0);
        const double tgt = 0.15 + 0.7 * (u(rng) / 2.0);
        const LossValue bce = bce_centerness(pred, tgt);
        auto bce_probe = [&](int, double eps) { return bce_centerness(pred + eps, tgt).value; };
        if (!gradient_matches(bce, bce_probe, 1, 1e-4)) return false;

        const Ltrb p{u(rng), u(rng), u(rng), u(rng)};
        const Ltrb t{u(rng), u(rng), u(rng), u(rng)};
        const LossValue il = iou_loss(p, t);
        auto iou_probe = [&](int k, double eps) {
            Ltrb shifted = p;
            shifted[static_cast<std::size_t>(k)] += eps;
            return iou_loss(shifted, t).value;
        };
        if (!gradient_matches(il, iou_probe, 4, 1e-3)) return false;
    }
    return true;
}

// Plant a sharply self-similar template at an integer offset of a zero
// search crop; the combined score argmax must land on that cell.
bool check_matched_filter() {
    const int c = 3;
    Tensor3 tmpl(kTemplateSize, kTemplateSize, c);
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> dist(0.0f, 0.1f);
    for (float& v : tmpl.data()) v = dist(rng);
    for (int ch = 0; ch < c; ++ch) {
        tmpl.at(kTemplateSize / 2, kTemplateSize / 2, ch) = 100.0f;
    }

    for (int oy = 0; oy < kResponseSize; ++oy) {
        for (int ox = 0; ox < kResponseSize; ++ox) {
            Tensor3 search(kSearchSize, kSearchSize, c);
            for (int u = 0; u < kTemplateSize; ++u) {
                for (int v = 0; v < kTemplateSize; ++v) {
                    for (int ch = 0; ch < c; ++ch) {
                        search.at(oy + u, ox + v, ch) = tmpl.at(u, v, ch);
                    }
                }
            }
            const Tensor3 response = depthwise_xcorr(search, tmpl);
            const HeadOutputs outputs =
                decode_response(response, DecodingHead::analytic());
            const Box region{0.0, 0.0, 30.0, 30.0};
            const auto [box, conf] = select_target(outputs, region);
            const int cell_x = static_cast<int>(std::floor(box.cx() - 0.5)) - kResponseOffset;
            const int cell_y = static_cast<int>(std::floor(box.cy() - 0.5)) - kResponseOffset;
            if (cell_x != ox || cell_y != oy) return false;
        }
    }
    return true;
}

bool check_evaluator() {
    // hand-computed three-prediction case: AP must be exactly 5/6
    std::vector<ScoredLabel> labels{{0.9, true}, {0.8, false}, {0.7, true}};
    if (std::abs(average_precision(labels, 2) - 5.0 / 6.0) > 1e-12) return false;
    if (average_precision({}, 3) != 0.0) return false;
    std::vector<ScoredLabel> perfect{{0.9, true}, {0.8, true}};
    return average_precision(perfect, 2) == 1.0;
}

}  // namespace

int run_selftest(std::ostream& out) {
    std::mt19937 rng(20240917);
    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        out << (ok ? "ok   " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };

    report("depthwise_xcorr matches reference loops", check_xcorr_oracle(rng));
    report("roi_align matches reference loops", check_roi_align_oracle(rng));
    report("conv2d matches reference loops", check_conv_oracle(rng));
    report("bilinear corner cases", check_bilinear_corners());
    report("hand-to-object encode/decode round-trip", check_geometry_roundtrip(rng));
    report("loss gradients match finite differences", check_gradients(rng));
    report("matched-filter placement sweep", check_matched_filter());
    report("average precision reference cases", check_evaluator());
    return failures;
}

}  // namespace tio
