#include "tio/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace tio {

std::vector<HandMatch> match_hands(const PredictionRecord& pred,
                                   const GroundTruthFrame& gt, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw PreconditionError("tau must lie in (0, 1)");

    std::vector<std::size_t> order(pred.hands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pred.hands[a].score > pred.hands[b].score;
    });

    std::vector<HandMatch> matches(pred.hands.size());
    std::vector<char> gt_taken(gt.hands.size(), 0);
    for (const std::size_t pi : order) {
        double best_iou = tau;  // must be strictly exceeded
        int best_gt = -1;
        for (std::size_t gi = 0; gi < gt.hands.size(); ++gi) {
            if (gt_taken[gi]) continue;
            const double v = iou(pred.hands[pi].box, gt.hands[gi].box);
            if (v > best_iou) {
                best_iou = v;
                best_gt = static_cast<int>(gi);
            }
        }
        if (best_gt >= 0) {
            matches[pi] = HandMatch{true, best_gt};
            gt_taken[static_cast<std::size_t>(best_gt)] = 1;
        }
    }
    return matches;
}

double average_precision(std::vector<ScoredLabel> labeled, std::size_t total_gt,
                         ApVariant variant, bool* undefined) {
    if (undefined) *undefined = false;
    if (total_gt == 0) {
        if (undefined) *undefined = true;
        return 0.0;
    }
    std::stable_sort(labeled.begin(), labeled.end(),
                     [](const ScoredLabel& a, const ScoredLabel& b) {
                         return a.score > b.score;
                     });

    const std::size_t n = labeled.size();
    std::vector<double> precision(n);
    std::vector<double> recall(n);
    std::size_t tp = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (labeled[k].is_tp) ++tp;
        precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
        recall[k] = static_cast<double>(tp) / static_cast<double>(total_gt);
    }

    // monotone precision envelope from the right
    std::vector<double> envelope(precision);
    for (std::size_t k = n; k-- > 1;) {
        envelope[k - 1] = std::max(envelope[k - 1], envelope[k]);
    }

    if (variant == ApVariant::eleven_point) {
        double sum = 0.0;
        for (int step = 0; step <= 10; ++step) {
            const double r = step / 10.0;
            double p = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (recall[k] >= r - 1e-12) {
                    p = envelope[k];
                    break;
                }
            }
            sum += p;
        }
        return sum / 11.0;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!labeled[k].is_tp) continue;
        ap += (recall[k] - prev_recall) * envelope[k];
        prev_recall = recall[k];
    }
    return ap;
}

namespace {

bool object_correct(const PredictedHand& pred, const GroundTruthHand& gt, double tau) {
    if (gt.object_box) {
        return pred.object_box && iou(*pred.object_box, *gt.object_box) > tau;
    }
    return !pred.object_box;
}

const PredictionRecord* find_record(
    const std::unordered_map<std::int64_t, const PredictionRecord*>& index,
    std::int64_t frame) {
    const auto it = index.find(frame);
    return it == index.end() ? nullptr : it->second;
}

std::unordered_map<std::int64_t, const PredictionRecord*> index_predictions(
    const std::vector<PredictionRecord>& preds) {
    std::unordered_map<std::int64_t, const PredictionRecord*> index;
    for (const auto& p : preds) index.emplace(p.frame_index, &p);
    return index;
}

// Pooled detection-style AP of linked objects, optionally restricted to
// ground-truth hands in one contact state and/or one scene tag. Frames that
// contain no in-scope ground truth still contribute their unmatched object
// predictions as false positives only when unrestricted; under a state
// restriction, only frames exhibiting that state participate at all.
double pooled_object_ap(const std::vector<PredictionRecord>& preds,
                        const std::vector<GroundTruthFrame>& gts, double tau,
                        ApVariant variant, const std::optional<ContactState>& state,
                        const std::optional<std::string>& scene) {
    const auto index = index_predictions(preds);
    std::vector<ScoredLabel> labels;
    std::size_t total_gt = 0;
    static const PredictionRecord empty_record;

    for (const auto& gt : gts) {
        if (!gt.annotated) continue;
        if (scene && gt.scene_tag != *scene) continue;
        if (state && std::none_of(gt.hands.begin(), gt.hands.end(),
                                  [&](const GroundTruthHand& h) {
                                      return h.contact_state == *state;
                                  })) {
            continue;
        }
        const PredictionRecord* rec = find_record(index, gt.frame_index);
        if (rec == nullptr) rec = &empty_record;

        for (const auto& h : gt.hands) {
            if (h.object_box && (!state || h.contact_state == *state)) ++total_gt;
        }

        const std::vector<HandMatch> matches = match_hands(*rec, gt, tau);
        for (std::size_t pi = 0; pi < rec->hands.size(); ++pi) {
            const PredictedHand& ph = rec->hands[pi];
            if (!ph.object_box) continue;
            if (matches[pi].is_tp) {
                const GroundTruthHand& gh = gt.hands[static_cast<std::size_t>(matches[pi].gt_index)];
                if (state && gh.contact_state != *state) continue;  // scored in its own slice
                const bool tp = gh.object_box && iou(*ph.object_box, *gh.object_box) > tau;
                labels.push_back({ph.object_score, tp});
            } else {
                labels.push_back({ph.object_score, false});
            }
        }
    }
    return average_precision(std::move(labels), total_gt, variant);
}

}  // namespace

double object_ap(const std::vector<PredictionRecord>& preds,
                 const std::vector<GroundTruthFrame>& gts, double tau,
                 ApVariant variant) {
    return pooled_object_ap(preds, gts, tau, variant, std::nullopt, std::nullopt);
}

FullStateReport full_state_map(const std::vector<PredictionRecord>& preds,
                               const std::vector<GroundTruthFrame>& gts, double tau,
                               ApVariant variant, bool per_scene) {
    const auto index = index_predictions(preds);
    static const PredictionRecord empty_record;

    std::vector<ScoredLabel> hand_labels;
    std::vector<ScoredLabel> state_labels;
    std::vector<ScoredLabel> side_labels;
    std::vector<ScoredLabel> object_labels;
    std::vector<ScoredLabel> all_labels;
    FullStateReport report;
    report.variant = variant;

    for (const auto& gt : gts) {
        if (!gt.annotated) continue;
        ++report.annotated_frames;
        report.total_gt_hands += gt.hands.size();
        for (const auto& h : gt.hands) {
            if (h.object_box) ++report.total_gt_objects;
        }

        const PredictionRecord* rec = find_record(index, gt.frame_index);
        if (rec == nullptr) rec = &empty_record;
        const std::vector<HandMatch> matches = match_hands(*rec, gt, tau);
        for (std::size_t pi = 0; pi < rec->hands.size(); ++pi) {
            const PredictedHand& ph = rec->hands[pi];
            const bool matched = matches[pi].is_tp;
            bool state_ok = false;
            bool side_ok = false;
            bool obj_ok = false;
            if (matched) {
                const GroundTruthHand& gh =
                    gt.hands[static_cast<std::size_t>(matches[pi].gt_index)];
                state_ok = ph.contact_state == gh.contact_state;
                side_ok = ph.side == gh.side;
                obj_ok = object_correct(ph, gh, tau);
            }
            hand_labels.push_back({ph.score, matched});
            state_labels.push_back({ph.score, matched && state_ok});
            side_labels.push_back({ph.score, matched && side_ok});
            object_labels.push_back({ph.score, matched && obj_ok});
            all_labels.push_back({ph.score, matched && state_ok && side_ok && obj_ok});
        }
    }

    const std::size_t gt_hands = report.total_gt_hands;
    report.hand_ap = average_precision(std::move(hand_labels), gt_hands, variant);
    report.hstate_ap = average_precision(std::move(state_labels), gt_hands, variant);
    report.hside_ap = average_precision(std::move(side_labels), gt_hands, variant);
    report.object_ap = average_precision(std::move(object_labels), gt_hands, variant);
    report.all_map = average_precision(std::move(all_labels), gt_hands, variant);

    for (const ContactState s :
         {ContactState::self_contact, ContactState::other_person, ContactState::portable,
          ContactState::non_portable}) {
        report.state_object_ap[s] = pooled_object_ap(preds, gts, tau, variant, s,
                                                     std::nullopt);
    }
    if (per_scene) {
        for (const auto& gt : gts) {
            if (!gt.annotated || gt.scene_tag.empty()) continue;
            if (!report.scene_object_ap.count(gt.scene_tag)) {
                report.scene_object_ap[gt.scene_tag] =
                    pooled_object_ap(preds, gts, tau, variant, std::nullopt, gt.scene_tag);
            }
        }
    }
    return report;
}

}  // namespace tio
