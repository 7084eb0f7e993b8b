#pragma once

#include "tio/geometry.hpp"
#include "tio/tensor.hpp"

namespace tio {

// One frame's dense feature plus the geometry linking it to image pixels:
// feature coordinates = image coordinates / stride.
struct FeatureMap {
    Tensor3 map;
    double stride = 1.0;
    double image_w = 0.0;
    double image_h = 0.0;

    Box to_feature_coords(const Box& image_box) const {
        return Box{image_box.x / stride, image_box.y / stride, image_box.w / stride,
                   image_box.h / stride};
    }
};

}  // namespace tio
