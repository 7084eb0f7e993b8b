#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tio/geometry.hpp"

namespace tio {

enum class HandSide { left, right };

enum class ContactState {
    no_contact,
    self_contact,
    other_person,
    portable,
    non_portable,
};

// True for the states that put a trackable object in the hand.
inline bool contacts_object(ContactState s) {
    return s == ContactState::portable || s == ContactState::non_portable;
}

const char* to_string(HandSide side);
const char* to_string(ContactState state);
HandSide hand_side_from_string(const std::string& s);
ContactState contact_state_from_string(const std::string& s);

// One detected hand with its interaction-branch output.
struct HandDetection {
    Box box;
    double score = 0.0;
    HandSide side = HandSide::left;
    ContactState contact_state = ContactState::no_contact;
    HandToObject predicted_rel;  // where the branch thinks the object is
};

enum class CandidateSource { detector, tracker };

struct ObjectCandidate {
    Box box;
    double score = 0.0;
    CandidateSource source = CandidateSource::detector;
};

// Per-hand association result. `object_index` indexes the candidate list
// passed to assign_objects. A contact-state hand facing an empty candidate
// list keeps wants_object set with object_index absent.
struct Assignment {
    std::size_t hand_index = 0;
    std::optional<std::size_t> object_index;
    double compatibility = 0.0;
    bool wants_object = false;
};

// exp(-||predicted_rel - encode(hand.box, candidate.box)||_2); 1 at an
// exact match, strictly decreasing in encoding distance.
double compatibility_score(const HandDetection& hand, const ObjectCandidate& candidate);

// Argmax-compatibility candidate per contact-state hand (ties toward the
// lower candidate index). Hands whose state carries no object get none.
// Candidates may be claimed by several hands. When `min_compatibility` is
// set, matches scoring below it are dropped.
std::vector<Assignment> assign_objects(
    const std::vector<HandDetection>& hands,
    const std::vector<ObjectCandidate>& candidates,
    std::optional<double> min_compatibility = std::nullopt);

// Per-frame detection-provider output.
struct FrameDetections {
    std::int64_t frame_index = 0;
    std::vector<HandDetection> hands;
    std::vector<ObjectCandidate> objects;
};

}  // namespace tio
