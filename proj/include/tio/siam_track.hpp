#pragma once

#include <cstdint>
#include <utility>

#include "tio/feature_map.hpp"
#include "tio/head.hpp"
#include "tio/kernels.hpp"

namespace tio {

inline constexpr int kTemplateSize = 15;   // template feature is 15x15xC
inline constexpr int kSearchSize = 30;     // search feature is 30x30xC
inline constexpr int kResponseSize = 16;   // valid correlation: 30-15+1
inline constexpr int kResponseOffset = (kTemplateSize - 1) / 2;

// Per-object tracker state: the object's template feature and where it was
// last seen in image coordinates.
struct TrackerState {
    Tensor3 tmpl;  // kTemplateSize x kTemplateSize x C
    Box prev_box;
    std::uint64_t object_id = 0;
};

// Decoded response heads. cls channel 0 is the foreground probability and
// channel 1 the background (they sum to 1 per location); cen is in [0,1];
// reg holds (l, t, r, b) distances in search-grid units, >= 0.
struct HeadOutputs {
    Tensor3 cls;  // 16x16x2
    Tensor3 cen;  // 16x16x1
    Tensor3 reg;  // 16x16x4
};

// ROI-align the box (image coords, clipped to the image) to a fixed
// kTemplateSize square template.
Tensor3 extract_template(const FeatureMap& frame, const Box& box,
                         int samples_per_axis = 2);

// Expand prev_box by `factor` (shift-then-clip against the image), ROI-align
// the region to a kSearchSize square, and return both the tensor and the
// region so callers can map grid coordinates back to image pixels.
std::pair<Tensor3, Box> extract_search(const FeatureMap& frame, const Box& prev_box,
                                       double factor = 2.0, int samples_per_axis = 2);

// Decode a 16x16xC response into cls/cen/reg heads.
//
// Analytic variant: with r = channel mean of the response, foreground is
// the min-max normalization (r - min) / (max - min + 1e-12), defined as a
// flat 0.5 when max == min; cen multiplies foreground with a separable
// 16-point raised-cosine window (zero-free variant, w(n) =
// 0.5*(1 - cos(2*pi*(n+1)/17))); reg is the constant quadruple
// (wt/2, ht/2, wt/2, ht/2) where (wt, ht) is the template box extent
// expressed in 30-unit search-grid coordinates.
//
// Learned variant: per-branch conv stacks (ReLU between layers) with
// softmax over cls channels, sigmoid on cen, ReLU on reg.
HeadOutputs decode_response(const Tensor3& response, const DecodingHead& head,
                            double template_grid_w = 15.0,
                            double template_grid_h = 15.0);

// The per-location selection score: foreground probability times
// center-ness.
double selection_score(const HeadOutputs& outputs, int i, int j);

// Pick the argmax of the combined score (ties toward the lower row-major
// index) and decode its regression into an image-space box. Response cell
// (i, j) sits at search-grid center (j + kResponseOffset, i + kResponseOffset),
// and grid coordinate g maps to image x = region.x + (g + 0.5) / 30 * region.w
// (y analogous). Returns the box and the winning score as confidence.
std::pair<Box, double> select_target(const HeadOutputs& outputs, const Box& region);

struct TrackStepResult {
    Box box;
    double confidence = 0.0;
    TrackerState state;
};

// One tracking step: extract the search region around prev_box, correlate
// with the template, decode, select, then refresh the template from the
// current frame at the new box.
TrackStepResult track_step(const TrackerState& state, const FeatureMap& frame,
                           const DecodingHead& head, double search_factor = 2.0);

}  // namespace tio
