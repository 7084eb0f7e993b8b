#include "tio/siam_track.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tio {

namespace {

// Zero-free 16-point raised cosine (the N+2-point window with its zero
// endpoints dropped); strictly positive so border response cells stay
// selectable.
double raised_cosine16(int n) {
    return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (n + 1) /
                                 (kResponseSize + 1)));
}

void require_response_shape(const Tensor3& response) {
    if (response.height() != kResponseSize || response.width() != kResponseSize) {
        throw ShapeError("decode_response: expected " + std::to_string(kResponseSize) +
                         "x" + std::to_string(kResponseSize) + " response, got " +
                         std::to_string(response.height()) + "x" +
                         std::to_string(response.width()));
    }
}

Tensor3 relu(Tensor3 t) {
    for (float& v : t.data()) v = std::max(v, 0.0f);
    return t;
}

Tensor3 run_branch(const Tensor3& input, const std::vector<ConvLayer>& layers,
                   const char* name) {
    if (layers.empty()) {
        throw ShapeError(std::string("learned head: branch '") + name + "' has no layers");
    }
    Tensor3 t = input;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& layer = layers[li];
        const int pad_h = (layer.kernel.kh - 1) / 2;
        const int pad_w = (layer.kernel.kw - 1) / 2;
        if (pad_h != pad_w) {
            throw ShapeError(std::string("learned head: branch '") + name +
                             "' kernel must be square-padded");
        }
        t = conv2d(t, layer.kernel, layer.bias, pad_h);
        if (li + 1 < layers.size()) t = relu(std::move(t));
    }
    if (t.height() != kResponseSize || t.width() != kResponseSize) {
        throw ShapeError(std::string("learned head: branch '") + name +
                         "' does not preserve the response size");
    }
    return t;
}

HeadOutputs decode_analytic(const Tensor3& response, double template_grid_w,
                            double template_grid_h) {
    const int n = kResponseSize;
    Tensor3 mean(n, n, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int c = 0; c < response.channels(); ++c) acc += response.at(i, j, c);
            mean.at(i, j, 0) = static_cast<float>(acc / response.channels());
        }
    }
    const auto [mn_it, mx_it] = std::minmax_element(mean.data().begin(), mean.data().end());
    const float mn = *mn_it;
    const float mx = *mx_it;

    HeadOutputs out{Tensor3(n, n, 2), Tensor3(n, n, 1), Tensor3(n, n, 4)};
    const float denom = mx - mn + 1e-12f;
    const float lt = static_cast<float>(template_grid_w / 2.0);
    const float tp = static_cast<float>(template_grid_h / 2.0);
    for (int i = 0; i < n; ++i) {
        const float wi = static_cast<float>(raised_cosine16(i));
        for (int j = 0; j < n; ++j) {
            const float fg = (mx == mn) ? 0.5f : (mean.at(i, j, 0) - mn) / denom;
            out.cls.at(i, j, 0) = fg;
            out.cls.at(i, j, 1) = 1.0f - fg;
            out.cen.at(i, j, 0) = fg * wi * static_cast<float>(raised_cosine16(j));
            out.reg.at(i, j, 0) = lt;
            out.reg.at(i, j, 1) = tp;
            out.reg.at(i, j, 2) = lt;
            out.reg.at(i, j, 3) = tp;
        }
    }
    return out;
}

HeadOutputs decode_learned(const Tensor3& response, const DecodingHead& head) {
    Tensor3 cls_raw = run_branch(response, head.cls_layers, "cls");
    Tensor3 cen_raw = run_branch(response, head.cen_layers, "cen");
    Tensor3 reg_raw = run_branch(response, head.reg_layers, "reg");
    if (cls_raw.channels() != 2) throw ShapeError("learned head: cls must end with 2 channels");
    if (cen_raw.channels() != 1) throw ShapeError("learned head: cen must end with 1 channel");
    if (reg_raw.channels() != 4) throw ShapeError("learned head: reg must end with 4 channels");

    const int n = kResponseSize;
    HeadOutputs out{Tensor3(n, n, 2), Tensor3(n, n, 1), std::move(reg_raw)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const float a = cls_raw.at(i, j, 0);
            const float b = cls_raw.at(i, j, 1);
            const float m = std::max(a, b);
            const float ea = std::exp(a - m);
            const float eb = std::exp(b - m);
            out.cls.at(i, j, 0) = ea / (ea + eb);
            out.cls.at(i, j, 1) = eb / (ea + eb);
            out.cen.at(i, j, 0) = 1.0f / (1.0f + std::exp(-cen_raw.at(i, j, 0)));
        }
    }
    out.reg = relu(std::move(out.reg));
    return out;
}

}  // namespace

Tensor3 extract_template(const FeatureMap& frame, const Box& box, int samples_per_axis) {
    if (!(box.w > 0.0) || !(box.h > 0.0)) {
        throw DegenerateBoxError("extract_template: box extent must be positive");
    }
    const Box clipped = clip_to_image(box, frame.image_w, frame.image_h);
    return roi_align(frame.map, frame.to_feature_coords(clipped), kTemplateSize,
                     kTemplateSize, samples_per_axis);
}

std::pair<Tensor3, Box> extract_search(const FeatureMap& frame, const Box& prev_box,
                                       double factor, int samples_per_axis) {
    const Box region =
        expand_search_region(prev_box, factor, frame.image_w, frame.image_h);
    Tensor3 tensor = roi_align(frame.map, frame.to_feature_coords(region), kSearchSize,
                               kSearchSize, samples_per_axis);
    return {std::move(tensor), region};
}

HeadOutputs decode_response(const Tensor3& response, const DecodingHead& head,
                            double template_grid_w, double template_grid_h) {
    require_response_shape(response);
    if (head.variant == DecodingHead::Variant::reference_analytic) {
        return decode_analytic(response, template_grid_w, template_grid_h);
    }
    return decode_learned(response, head);
}

double selection_score(const HeadOutputs& outputs, int i, int j) {
    return static_cast<double>(outputs.cls.at(i, j, 0)) * outputs.cen.at(i, j, 0);
}

std::pair<Box, double> select_target(const HeadOutputs& outputs, const Box& region) {
    int best_i = 0;
    int best_j = 0;
    double best = -1.0;
    for (int i = 0; i < kResponseSize; ++i) {
        for (int j = 0; j < kResponseSize; ++j) {
            const double s = selection_score(outputs, i, j);
            if (s > best) {
                best = s;
                best_i = i;
                best_j = j;
            }
        }
    }

    const double sx = region.w / kSearchSize;
    const double sy = region.h / kSearchSize;
    const double cx = region.x + (best_j + kResponseOffset + 0.5) * sx;
    const double cy = region.y + (best_i + kResponseOffset + 0.5) * sy;
    const double l = outputs.reg.at(best_i, best_j, 0);
    const double t = outputs.reg.at(best_i, best_j, 1);
    const double r = outputs.reg.at(best_i, best_j, 2);
    const double b = outputs.reg.at(best_i, best_j, 3);
    // Floor degenerate regressions so the box stays valid.
    const double w = std::max((l + r) * sx, 1e-6);
    const double h = std::max((t + b) * sy, 1e-6);
    Box box{cx - l * sx, cy - t * sy, w, h};
    return {box, best};
}

TrackStepResult track_step(const TrackerState& state, const FeatureMap& frame,
                           const DecodingHead& head, double search_factor) {
    if (state.tmpl.height() != kTemplateSize || state.tmpl.width() != kTemplateSize) {
        throw ShapeError("track_step: template must be " + std::to_string(kTemplateSize) +
                         "x" + std::to_string(kTemplateSize));
    }
    if (state.tmpl.channels() != frame.map.channels()) {
        throw ShapeError("track_step: template/frame channel mismatch");
    }

    auto [search, region] = extract_search(frame, state.prev_box, search_factor);
    const Tensor3 response = depthwise_xcorr(search, state.tmpl);
    const HeadOutputs outputs =
        decode_response(response, head, state.prev_box.w / region.w * kSearchSize,
                        state.prev_box.h / region.h * kSearchSize);
    auto [box, confidence] = select_target(outputs, region);

    TrackStepResult result;
    result.box = box;
    result.confidence = confidence;
    result.state.tmpl = extract_template(frame, box);
    result.state.prev_box = box;
    result.state.object_id = state.object_id;
    return result;
}

}  // namespace tio
