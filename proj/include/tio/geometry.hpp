#pragma once

#include <cstddef>
#include <vector>

#include "tio/errors.hpp"

namespace tio {

// Axis-aligned rectangle in pixel coordinates, left/top edge plus extent.
// Extents are strictly positive by contract.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 1.0;
    double h = 1.0;

    double right() const { return x + w; }
    double bottom() const { return y + h; }
    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
    double area() const { return w * h; }

    bool valid() const;
};

// Object location expressed relative to a hand box: offsets normalized by
// the hand extent plus natural-log size ratios.
struct HandToObject {
    double dx = 0.0;
    double dy = 0.0;
    double dw = 0.0;
    double dh = 0.0;
};

// Intersection-over-union; 0 for disjoint boxes.
double iou(const Box& a, const Box& b);

// ((xo-xh)/wh, (yo-yh)/hh, ln(wo/wh), ln(ho/hh))
HandToObject encode_hand_to_object(const Box& hand, const Box& object);

// Exact inverse of encode_hand_to_object.
Box decode_hand_to_object(const Box& hand, const HandToObject& rel);

// Euclidean distance between two encodings.
double encoding_distance(const HandToObject& a, const HandToObject& b);

// Scale a box about its center by `factor`, then move it to lie inside the
// image where possible and clip only what cannot fit (shift-then-clip).
// Throws EmptyRegionError when `prev` does not intersect the image at all.
Box expand_search_region(const Box& prev, double factor, double image_w, double image_h);

// Clip a box to [0, image_w] x [0, image_h]. Throws EmptyRegionError when
// nothing remains.
Box clip_to_image(const Box& box, double image_w, double image_h);

// Greedy non-maximum suppression. Keeps the highest-scoring remaining box,
// suppresses remaining boxes with IoU > threshold against it, repeats.
// Score ties break toward the lower input index. Returns kept indices in
// keep order.
std::vector<std::size_t> nms(const std::vector<std::pair<Box, double>>& boxes,
                             double iou_threshold);

}  // namespace tio
