#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tio/geometry.hpp"

namespace tio {

// Scalar loss plus its analytic gradient with respect to the prediction,
// laid out exactly like the prediction input.
struct LossValue {
    double value = 0.0;
    std::vector<double> gradient;
    bool degenerate = false;
};

// (left, top, right, bottom) distances from a shared anchor point, >= 0.
using Ltrb = std::array<double, 4>;

// -log softmax(logits)[target], stabilized by max subtraction.
// gradient = softmax(logits) - one_hot(target).
LossValue cross_entropy(const std::vector<double>& logits, std::size_t target);

// Binary cross-entropy on a single probability; pred is clamped to
// [1e-7, 1 - 1e-7] before the logs.
LossValue bce_centerness(double pred, double target);

// -ln(IoU) of two ltrb boxes sharing an anchor, IoU clamped at 1e-7.
// A zero-area prediction yields the clamped maximum with `degenerate` set.
LossValue iou_loss(const Ltrb& pred, const Ltrb& target);

// Sum of absolute component differences; subgradient sign(pred - target).
LossValue l1_hand2obj(const HandToObject& pred, const HandToObject& target);

// Elementwise smooth-L1 (Huber) with the given beta, summed.
LossValue smooth_l1(const std::vector<double>& pred, const std::vector<double>& target,
                    double beta = 1.0);

// Elementwise absolute difference, summed.
LossValue l1(const std::vector<double>& pred, const std::vector<double>& target);

struct ClsTerm {
    std::vector<double> logits;
    std::size_t target = 0;
};
struct CenTerm {
    double pred = 0.5;
    double target = 0.5;
};
struct RegTerm {
    Ltrb pred{};
    Ltrb target{};
};

// Unweighted sum of the three branch means. The gradient concatenates the
// per-term gradients in input order (all cls logits, then cen preds, then
// reg quadruples), each scaled by 1/n of its branch.
LossValue motion_loss(const std::vector<ClsTerm>& cls_terms,
                      const std::vector<CenTerm>& cen_terms,
                      const std::vector<RegTerm>& reg_terms);

// Center-ness regression target for an ltrb sample:
// sqrt((min(l,r)/max(l,r)) * (min(t,b)/max(t,b))).
double centerness_target(const Ltrb& ltrb);

}  // namespace tio
