#include "tio/losses.hpp"

#include <algorithm>
#include <cmath>

namespace tio {

namespace {
constexpr double kProbFloor = 1e-7;
}

LossValue cross_entropy(const std::vector<double>& logits, std::size_t target) {
    if (logits.size() < 2) {
        throw PreconditionError("cross_entropy: need at least 2 classes");
    }
    if (target >= logits.size()) {
        throw PreconditionError("cross_entropy: target class out of range");
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) z += std::exp(v - m);
    const double log_z = std::log(z);

    LossValue out;
    out.value = log_z - (logits[target] - m);
    out.gradient.resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out.gradient[k] = std::exp(logits[k] - m) / z - (k == target ? 1.0 : 0.0);
    }
    return out;
}

LossValue bce_centerness(double pred, double target) {
    const double p = std::clamp(pred, kProbFloor, 1.0 - kProbFloor);
    LossValue out;
    out.value = -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
    out.gradient = {(p - target) / (p * (1.0 - p))};
    return out;
}

LossValue iou_loss(const Ltrb& pred, const Ltrb& target) {
    const double tw = target[0] + target[2];
    const double th = target[1] + target[3];
    if (tw * th <= 0.0) {
        throw PreconditionError("iou_loss: target box area must be positive");
    }

    const double pw = pred[0] + pred[2];
    const double ph = pred[1] + pred[3];
    LossValue out;
    out.gradient.assign(4, 0.0);
    if (pw * ph <= 0.0) {
        out.value = -std::log(kProbFloor);
        out.degenerate = true;
        return out;
    }

    // Overlap per side is the smaller of the two distances from the shared
    // anchor point.
    const double iw = std::min(pred[0], target[0]) + std::min(pred[2], target[2]);
    const double ih = std::min(pred[1], target[1]) + std::min(pred[3], target[3]);
    const double inter = iw * ih;
    const double uni = pw * ph + tw * th - inter;
    const double iou_raw = inter / uni;
    const double iou = std::max(iou_raw, kProbFloor);
    out.value = -std::log(iou);

    if (iou_raw <= kProbFloor) {
        // In the clamp region, loss is locally constant.
        return out;
    }

    // d(-ln IoU)/dx = -(1/inter) dInter/dx + (1/union) dUnion/dx
    const double d_area[4] = {ph, pw, ph, pw};  // dA_p/d{l,t,r,b}
    const double d_iw[4] = {pred[0] < target[0] ? 1.0 : 0.0, 0.0,
                            pred[2] < target[2] ? 1.0 : 0.0, 0.0};
    const double d_ih[4] = {0.0, pred[1] < target[1] ? 1.0 : 0.0, 0.0,
                            pred[3] < target[3] ? 1.0 : 0.0};
    for (int k = 0; k < 4; ++k) {
        const double d_inter = d_iw[k] * ih + d_ih[k] * iw;
        const double d_union = d_area[k] - d_inter;
        out.gradient[k] = -(d_inter / inter) + (d_union / uni);
    }
    return out;
}

LossValue l1_hand2obj(const HandToObject& pred, const HandToObject& target) {
    const double d[4] = {pred.dx - target.dx, pred.dy - target.dy, pred.dw - target.dw,
                         pred.dh - target.dh};
    LossValue out;
    out.gradient.resize(4);
    for (int k = 0; k < 4; ++k) {
        out.value += std::abs(d[k]);
        out.gradient[k] = d[k] > 0.0 ? 1.0 : (d[k] < 0.0 ? -1.0 : 0.0);
    }
    return out;
}

LossValue smooth_l1(const std::vector<double>& pred, const std::vector<double>& target,
                    double beta) {
    if (pred.size() != target.size()) {
        throw PreconditionError("smooth_l1: length mismatch");
    }
    LossValue out;
    out.gradient.resize(pred.size());
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = pred[k] - target[k];
        if (std::abs(d) < beta) {
            out.value += 0.5 * d * d / beta;
            out.gradient[k] = d / beta;
        } else {
            out.value += std::abs(d) - 0.5 * beta;
            out.gradient[k] = d > 0.0 ? 1.0 : -1.0;
        }
    }
    return out;
}

LossValue l1(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.size() != target.size()) {
        throw PreconditionError("l1: length mismatch");
    }
    LossValue out;
    out.gradient.resize(pred.size());
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = pred[k] - target[k];
        out.value += std::abs(d);
        out.gradient[k] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    }
    return out;
}

LossValue motion_loss(const std::vector<ClsTerm>& cls_terms,
                      const std::vector<CenTerm>& cen_terms,
                      const std::vector<RegTerm>& reg_terms) {
    LossValue out;
    bool degenerate = false;

    const double cls_n = cls_terms.empty() ? 1.0 : static_cast<double>(cls_terms.size());
    for (const auto& t : cls_terms) {
        const LossValue lv = cross_entropy(t.logits, t.target);
        out.value += lv.value / cls_n;
        for (double g : lv.gradient) out.gradient.push_back(g / cls_n);
    }
    const double cen_n = cen_terms.empty() ? 1.0 : static_cast<double>(cen_terms.size());
    for (const auto& t : cen_terms) {
        const LossValue lv = bce_centerness(t.pred, t.target);
        out.value += lv.value / cen_n;
        out.gradient.push_back(lv.gradient[0] / cen_n);
    }
    const double reg_n = reg_terms.empty() ? 1.0 : static_cast<double>(reg_terms.size());
    for (const auto& t : reg_terms) {
        const LossValue lv = iou_loss(t.pred, t.target);
        degenerate = degenerate || lv.degenerate;
        out.value += lv.value / reg_n;
        for (double g : lv.gradient) out.gradient.push_back(g / reg_n);
    }
    out.degenerate = degenerate;
    return out;
}

double centerness_target(const Ltrb& ltrb) {
    const double lr = std::max(ltrb[0], ltrb[2]);
    const double tb = std::max(ltrb[1], ltrb[3]);
    if (lr <= 0.0 || tb <= 0.0) return 0.0;
    return std::sqrt((std::min(ltrb[0], ltrb[2]) / lr) * (std::min(ltrb[1], ltrb[3]) / tb));
}

}  // namespace tio
