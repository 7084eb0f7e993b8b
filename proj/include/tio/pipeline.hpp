#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tio/interaction.hpp"
#include "tio/siam_track.hpp"

namespace tio {

// One live interacting-object track, bound to the hand that picked it up.
struct TrackEntry {
    std::uint64_t object_id = 0;
    HandSide hand_side = HandSide::left;
    TrackerState tracker;
    Box last_box;
    Box last_hand_box;   // for same-side disambiguation in multi-person scenes
    std::int64_t age = 1;
    int misses = 0;      // consecutive frames the bound hand reported no contact
    bool created_this_frame = false;
};

struct TrackingMemory {
    std::vector<TrackEntry> entries;
    std::uint64_t next_id = 1;
};

enum class TemplateUpdate { every_frame };

struct PipelineConfig {
    double nms_iou = 0.5;
    int miss_tolerance = 0;  // 0 = remove on the first detected no-contact
    double min_det_score = 0.1;
    double search_factor = 2.0;
    TemplateUpdate template_update = TemplateUpdate::every_frame;
    std::optional<double> compatibility_floor;

    void validate() const;
};

// Trajectory record for one frame.
struct FrameResult {
    struct HandResult {
        HandDetection hand;
        std::optional<std::uint64_t> object_id;
    };
    struct ObjectResult {
        std::uint64_t object_id = 0;
        Box box;
        double confidence = 0.0;
        CandidateSource source = CandidateSource::tracker;
    };

    std::int64_t frame_index = 0;
    std::vector<HandResult> hands;
    std::vector<ObjectResult> objects;
};

// A merged candidate remembers which track produced it, when any.
struct MergedCandidate {
    ObjectCandidate candidate;
    std::optional<std::uint64_t> object_id;
};

// Pool tracker and detector boxes and run NMS with tracker boxes strictly
// first: a tracker box is never suppressed by a detector box, whatever the
// raw scores. Survivors keep their source and object id.
std::vector<MergedCandidate> merge_candidates(
    const std::vector<ObjectCandidate>& detections,
    const std::vector<FrameResult::ObjectResult>& tracked, double nms_iou);

// Advance the memory by one frame:
//  1. step every live tracker on the frame feature (parallel across entries)
//  2. merge tracker and detector candidates (tracker priority NMS)
//  3. associate candidates to contact-state hands
//  4. open a new track when a hand's best match is a detector box that no
//     live entry explains
//  5. miss bookkeeping: a detected no-contact hand ages its entry out
//     (misses > miss_tolerance removes it); an absent hand changes nothing
//  6. emit the frame's hands, links, and object boxes
std::pair<TrackingMemory, FrameResult> step_frame(const TrackingMemory& memory,
                                                  const FeatureMap& frame,
                                                  const FrameDetections& detections,
                                                  const PipelineConfig& config,
                                                  const DecodingHead& head);

// Fold step_frame over an ordered frame sequence starting from empty memory.
// Features are pulled one frame at a time; detections must carry strictly
// matching frame indices.
std::vector<FrameResult> run_sequence(
    std::int64_t frame_count,
    const std::function<FeatureMap(std::int64_t)>& feature_provider,
    const std::vector<FrameDetections>& detections, const PipelineConfig& config,
    const DecodingHead& head,
    const std::function<void(const FrameResult&)>& on_frame = nullptr);

}  // namespace tio
