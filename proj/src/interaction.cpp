#include "tio/interaction.hpp"

#include <cmath>

namespace tio {

const char* to_string(HandSide side) {
    return side == HandSide::left ? "l" : "r";
}

const char* to_string(ContactState state) {
    switch (state) {
        case ContactState::no_contact: return "none";
        case ContactState::self_contact: return "self";
        case ContactState::other_person: return "other";
        case ContactState::portable: return "portable";
        case ContactState::non_portable: return "nonportable";
    }
    return "none";
}

HandSide hand_side_from_string(const std::string& s) {
    if (s == "l" || s == "left") return HandSide::left;
    if (s == "r" || s == "right") return HandSide::right;
    throw ParseError("unknown hand side: " + s);
}

ContactState contact_state_from_string(const std::string& s) {
    if (s == "none") return ContactState::no_contact;
    if (s == "self") return ContactState::self_contact;
    if (s == "other") return ContactState::other_person;
    if (s == "portable") return ContactState::portable;
    if (s == "nonportable") return ContactState::non_portable;
    throw ParseError("unknown contact state: " + s);
}

double compatibility_score(const HandDetection& hand, const ObjectCandidate& candidate) {
    const HandToObject actual = encode_hand_to_object(hand.box, candidate.box);
    return std::exp(-encoding_distance(hand.predicted_rel, actual));
}

std::vector<Assignment> assign_objects(const std::vector<HandDetection>& hands,
                                       const std::vector<ObjectCandidate>& candidates,
                                       std::optional<double> min_compatibility) {
    std::vector<Assignment> out;
    out.reserve(hands.size());
    for (std::size_t h = 0; h < hands.size(); ++h) {
        Assignment a;
        a.hand_index = h;
        a.wants_object = contacts_object(hands[h].contact_state);
        if (a.wants_object) {
            double best = -1.0;
            for (std::size_t j = 0; j < candidates.size(); ++j) {
                const double s = compatibility_score(hands[h], candidates[j]);
                if (s > best) {
                    best = s;
                    a.object_index = j;
                    a.compatibility = s;
                }
            }
            if (min_compatibility && a.object_index &&
                a.compatibility < *min_compatibility) {
                a.object_index.reset();
                a.compatibility = 0.0;
            }
        }
        out.push_back(a);
    }
    return out;
}

}  // namespace tio
