#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tio/interaction.hpp"

namespace tio {

// One annotated hand with the object it touches, when any.
struct GroundTruthHand {
    Box box;
    HandSide side = HandSide::left;
    ContactState contact_state = ContactState::no_contact;
    std::optional<Box> object_box;
};

struct GroundTruthFrame {
    std::int64_t frame_index = 0;
    bool annotated = true;
    std::string scene_tag;
    std::vector<GroundTruthHand> hands;
};

// One predicted hand with its linked object, when any.
struct PredictedHand {
    Box box;
    double score = 0.0;
    HandSide side = HandSide::left;
    ContactState contact_state = ContactState::no_contact;
    std::optional<Box> object_box;
    double object_score = 0.0;
};

struct PredictionRecord {
    std::int64_t frame_index = 0;
    std::vector<PredictedHand> hands;
};

// Per-prediction outcome of greedy box matching.
struct HandMatch {
    bool is_tp = false;
    int gt_index = -1;  // matched ground-truth hand, -1 when unmatched
};

// Greedy one-to-one matching in descending prediction score (ties by input
// order). A prediction is a true positive iff its IoU with a still-unmatched
// ground-truth hand exceeds tau; among those it claims the highest-IoU one.
std::vector<HandMatch> match_hands(const PredictionRecord& pred,
                                   const GroundTruthFrame& gt, double tau);

enum class ApVariant { all_point, eleven_point };

// Scored detection outcome feeding the AP computation.
struct ScoredLabel {
    double score = 0.0;
    bool is_tp = false;
};

// Average precision over a pooled label list. all_point applies the
// monotone precision envelope and integrates over recall; eleven_point
// averages the envelope at recalls 0, 0.1, ..., 1. Zero ground truth yields
// 0 (flagged via *undefined when provided).
double average_precision(std::vector<ScoredLabel> labeled, std::size_t total_gt,
                         ApVariant variant = ApVariant::all_point,
                         bool* undefined = nullptr);

// AP of hand-associated objects pooled over annotated frames: an object
// prediction counts iff its box passes tau against the object of the very
// ground-truth hand its hand prediction matched.
double object_ap(const std::vector<PredictionRecord>& preds,
                 const std::vector<GroundTruthFrame>& gts, double tau,
                 ApVariant variant = ApVariant::all_point);

struct FullStateReport {
    double hand_ap = 0.0;
    double hstate_ap = 0.0;
    double hside_ap = 0.0;
    double object_ap = 0.0;
    double all_map = 0.0;
    ApVariant variant = ApVariant::all_point;
    std::size_t total_gt_hands = 0;
    std::size_t total_gt_objects = 0;
    std::size_t annotated_frames = 0;
    // Object AP restricted to ground-truth hands in one contact state.
    std::map<ContactState, double> state_object_ap;
    // Object AP per scene tag.
    std::map<std::string, double> scene_object_ap;
};

// The full evaluation: hand AP, the state/side-qualified hand APs, object
// AP, and the all-requirements metric (side AND state AND object must all
// be right for a hand true positive).
FullStateReport full_state_map(const std::vector<PredictionRecord>& preds,
                               const std::vector<GroundTruthFrame>& gts, double tau,
                               ApVariant variant = ApVariant::all_point,
                               bool per_scene = false);

}  // namespace tio
