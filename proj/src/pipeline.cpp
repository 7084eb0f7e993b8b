#include "tio/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "tio/parallel.hpp"

namespace tio {

void PipelineConfig::validate() const {
    if (!(nms_iou > 0.0 && nms_iou < 1.0)) {
        throw ConfigError("nms_iou must lie in (0, 1)");
    }
    if (miss_tolerance < 0) throw ConfigError("miss_tolerance must be >= 0");
    if (!(min_det_score >= 0.0 && min_det_score <= 1.0)) {
        throw ConfigError("min_det_score must lie in [0, 1]");
    }
    if (!(search_factor >= 1.0)) throw ConfigError("search_factor must be >= 1");
    if (compatibility_floor && !(*compatibility_floor >= 0.0 && *compatibility_floor <= 1.0)) {
        throw ConfigError("compatibility_floor must lie in [0, 1]");
    }
}

std::vector<MergedCandidate> merge_candidates(
    const std::vector<ObjectCandidate>& detections,
    const std::vector<FrameResult::ObjectResult>& tracked, double nms_iou) {
    std::vector<MergedCandidate> pool;
    pool.reserve(tracked.size() + detections.size());
    for (const auto& t : tracked) {
        pool.push_back({ObjectCandidate{t.box, t.confidence, CandidateSource::tracker},
                        t.object_id});
    }
    for (const auto& d : detections) {
        pool.push_back({ObjectCandidate{d.box, d.score, CandidateSource::detector},
                        std::nullopt});
    }

    // Tracker boxes come first whatever their score; raw score only orders
    // boxes within one source. Pool layout already groups tracker first, so
    // a stable per-source sort gives the full priority order.
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool ta = pool[a].candidate.source == CandidateSource::tracker;
        const bool tb = pool[b].candidate.source == CandidateSource::tracker;
        if (ta != tb) return ta;
        return pool[a].candidate.score > pool[b].candidate.score;
    });

    std::vector<char> suppressed(pool.size(), 0);
    std::vector<MergedCandidate> kept;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        if (suppressed[i]) continue;
        kept.push_back(pool[i]);
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const std::size_t j = order[oj];
            if (!suppressed[j] &&
                iou(pool[i].candidate.box, pool[j].candidate.box) > nms_iou) {
                suppressed[j] = 1;
            }
        }
    }
    return kept;
}

namespace {

// The detected hand a live entry answers to this frame: same side, and
// nearest to the previous hand box when several hands share the side.
const HandDetection* find_bound_hand(const TrackEntry& entry,
                                     const std::vector<HandDetection>& hands) {
    const HandDetection* best = nullptr;
    double best_iou = -1.0;
    for (const auto& h : hands) {
        if (h.side != entry.hand_side) continue;
        const double v = iou(h.box, entry.last_hand_box);
        if (v > best_iou) {
            best_iou = v;
            best = &h;
        }
    }
    return best;
}

}  // namespace

std::pair<TrackingMemory, FrameResult> step_frame(const TrackingMemory& memory,
                                                  const FeatureMap& frame,
                                                  const FrameDetections& detections,
                                                  const PipelineConfig& config,
                                                  const DecodingHead& head) {
    config.validate();
    if (!(frame.image_w > 0.0 && frame.image_h > 0.0) ||
        frame.map.width() * frame.stride < frame.image_w ||
        frame.map.height() * frame.stride < frame.image_h) {
        throw ConfigError("feature map does not cover the stated image dimensions");
    }

    TrackingMemory next = memory;
    std::unordered_map<std::uint64_t, double> frame_confidence;

    // 1. advance every live tracker
    std::vector<TrackStepResult> stepped(next.entries.size());
    parallel_for(next.entries.size(), [&](std::size_t i) {
        stepped[i] = track_step(next.entries[i].tracker, frame, head, config.search_factor);
    });
    for (std::size_t i = 0; i < next.entries.size(); ++i) {
        TrackEntry& e = next.entries[i];
        e.tracker = std::move(stepped[i].state);
        e.last_box = stepped[i].box;
        e.age += 1;
        e.created_this_frame = false;
        frame_confidence[e.object_id] = stepped[i].confidence;
    }

    // score gate on provider output
    std::vector<HandDetection> hands;
    for (const auto& h : detections.hands) {
        if (h.score >= config.min_det_score) hands.push_back(h);
    }
    std::vector<ObjectCandidate> objects;
    for (const auto& o : detections.objects) {
        if (o.score >= config.min_det_score) objects.push_back(o);
    }

    // 2. merge tracker and detector boxes, tracker priority
    std::vector<FrameResult::ObjectResult> tracked;
    tracked.reserve(next.entries.size());
    for (const auto& e : next.entries) {
        tracked.push_back({e.object_id, e.last_box, frame_confidence[e.object_id],
                           CandidateSource::tracker});
    }
    const std::vector<MergedCandidate> merged =
        merge_candidates(objects, tracked, config.nms_iou);

    // 3. associate candidates to hands
    std::vector<ObjectCandidate> candidate_list;
    candidate_list.reserve(merged.size());
    for (const auto& m : merged) candidate_list.push_back(m.candidate);
    const std::vector<Assignment> assignments =
        assign_objects(hands, candidate_list, config.compatibility_floor);

    // 4. open tracks for newly interacting objects
    std::vector<std::optional<std::uint64_t>> hand_links(hands.size());
    for (const Assignment& a : assignments) {
        if (!a.object_index) continue;
        const MergedCandidate& m = merged[*a.object_index];
        const HandDetection& hand = hands[a.hand_index];
        if (m.candidate.source == CandidateSource::tracker) {
            hand_links[a.hand_index] = m.object_id;
            for (auto& e : next.entries) {
                if (e.object_id == *m.object_id && e.hand_side == hand.side) {
                    e.last_hand_box = hand.box;
                }
            }
            continue;
        }

        // detector-sourced best match: already explained by a live track?
        const TrackEntry* owner = nullptr;
        double owner_iou = 0.0;
        for (const auto& e : next.entries) {
            const double v = iou(m.candidate.box, e.last_box);
            if (v >= config.nms_iou && v > owner_iou) {
                owner_iou = v;
                owner = &e;
            }
        }
        if (owner != nullptr) {
            hand_links[a.hand_index] = owner->object_id;
            continue;
        }

        // the hand picked up something new; a side holds one object at a time
        std::erase_if(next.entries,
                      [&](const TrackEntry& e) { return e.hand_side == hand.side; });
        TrackEntry entry;
        entry.object_id = next.next_id++;
        entry.hand_side = hand.side;
        entry.last_box = m.candidate.box;
        entry.last_hand_box = hand.box;
        entry.age = 1;
        entry.misses = 0;
        entry.created_this_frame = true;
        entry.tracker = TrackerState{extract_template(frame, m.candidate.box),
                                     m.candidate.box, entry.object_id};
        frame_confidence[entry.object_id] = m.candidate.score;
        hand_links[a.hand_index] = entry.object_id;
        next.entries.push_back(std::move(entry));
    }

    // 5. contact bookkeeping; absence of the hand is not evidence
    for (auto& e : next.entries) {
        const HandDetection* h = find_bound_hand(e, hands);
        if (h == nullptr) continue;
        if (contacts_object(h->contact_state)) {
            e.misses = 0;
            e.last_hand_box = h->box;
        } else {
            e.misses += 1;
        }
    }
    std::erase_if(next.entries, [&](const TrackEntry& e) {
        return e.misses > config.miss_tolerance;
    });

    // 6. emit
    FrameResult result;
    result.frame_index = detections.frame_index;
    for (std::size_t i = 0; i < hands.size(); ++i) {
        std::optional<std::uint64_t> link = hand_links[i];
        if (link && std::none_of(next.entries.begin(), next.entries.end(),
                                 [&](const TrackEntry& e) { return e.object_id == *link; })) {
            link.reset();  // the linked entry was retired this frame
        }
        result.hands.push_back({hands[i], link});
    }
    for (const auto& e : next.entries) {
        result.objects.push_back({e.object_id, e.last_box, frame_confidence[e.object_id],
                                  e.created_this_frame ? CandidateSource::detector
                                                       : CandidateSource::tracker});
    }
    return {std::move(next), std::move(result)};
}

std::vector<FrameResult> run_sequence(
    std::int64_t frame_count,
    const std::function<FeatureMap(std::int64_t)>& feature_provider,
    const std::vector<FrameDetections>& detections, const PipelineConfig& config,
    const DecodingHead& head, const std::function<void(const FrameResult&)>& on_frame) {
    if (static_cast<std::int64_t>(detections.size()) != frame_count) {
        throw SequencingError("detection stream length does not match frame count");
    }
    TrackingMemory memory;
    std::vector<FrameResult> results;
    results.reserve(static_cast<std::size_t>(frame_count));
    for (std::int64_t t = 0; t < frame_count; ++t) {
        if (detections[static_cast<std::size_t>(t)].frame_index != t) {
            throw SequencingError("detection frame index mismatch at frame " +
                                  std::to_string(t));
        }
        const FeatureMap frame = feature_provider(t);
        auto [next, fr] =
            step_frame(memory, frame, detections[static_cast<std::size_t>(t)], config, head);
        memory = std::move(next);
        if (on_frame) on_frame(fr);
        results.push_back(std::move(fr));
    }
    return results;
}

}  // namespace tio
