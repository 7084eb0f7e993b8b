#include "tio/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tio {

bool Box::valid() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
           std::isfinite(h) && w > 0.0 && h > 0.0;
}

double iou(const Box& a, const Box& b) {
    const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
    const double inter = ix * iy;
    if (inter <= 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

HandToObject encode_hand_to_object(const Box& hand, const Box& object) {
    return HandToObject{(object.x - hand.x) / hand.w, (object.y - hand.y) / hand.h,
                        std::log(object.w / hand.w), std::log(object.h / hand.h)};
}

Box decode_hand_to_object(const Box& hand, const HandToObject& rel) {
    return Box{hand.x + rel.dx * hand.w, hand.y + rel.dy * hand.h,
               hand.w * std::exp(rel.dw), hand.h * std::exp(rel.dh)};
}

double encoding_distance(const HandToObject& a, const HandToObject& b) {
    const double dx = a.dx - b.dx;
    const double dy = a.dy - b.dy;
    const double dw = a.dw - b.dw;
    const double dh = a.dh - b.dh;
    return std::sqrt(dx * dx + dy * dy + dw * dw + dh * dh);
}

namespace {

// Shift one axis of a scaled box into [0, limit], shrinking only when the
// extent exceeds the image.
void shift_then_clip_axis(double& pos, double& extent, double limit) {
    if (extent >= limit) {
        pos = 0.0;
        extent = limit;
        return;
    }
    pos = std::clamp(pos, 0.0, limit - extent);
}

}  // namespace

Box clip_to_image(const Box& box, double image_w, double image_h) {
    const double x0 = std::max(box.x, 0.0);
    const double y0 = std::max(box.y, 0.0);
    const double x1 = std::min(box.right(), image_w);
    const double y1 = std::min(box.bottom(), image_h);
    if (x1 - x0 <= 0.0 || y1 - y0 <= 0.0) {
        throw EmptyRegionError("box lies entirely outside the image");
    }
    return Box{x0, y0, x1 - x0, y1 - y0};
}

Box expand_search_region(const Box& prev, double factor, double image_w,
                         double image_h) {
    if (factor < 1.0) throw PreconditionError("search factor must be >= 1");
    if (prev.right() <= 0.0 || prev.bottom() <= 0.0 || prev.x >= image_w ||
        prev.y >= image_h) {
        throw EmptyRegionError("previous box lies entirely outside the image");
    }
    Box out;
    out.w = prev.w * factor;
    out.h = prev.h * factor;
    out.x = prev.cx() - 0.5 * out.w;
    out.y = prev.cy() - 0.5 * out.h;
    shift_then_clip_axis(out.x, out.w, image_w);
    shift_then_clip_axis(out.y, out.h, image_h);
    return out;
}

std::vector<std::size_t> nms(const std::vector<std::pair<Box, double>>& boxes,
                             double iou_threshold) {
    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return boxes[a].second > boxes[b].second;
    });

    std::vector<char> suppressed(boxes.size(), 0);
    std::vector<std::size_t> kept;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        if (suppressed[i]) continue;
        kept.push_back(i);
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const std::size_t j = order[oj];
            if (suppressed[j]) continue;
            if (iou(boxes[i].first, boxes[j].first) > iou_threshold) {
                suppressed[j] = 1;
            }
        }
    }
    return kept;
}

}  // namespace tio
