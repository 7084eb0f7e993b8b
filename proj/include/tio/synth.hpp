#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tio/eval.hpp"
#include "tio/feature_map.hpp"
#include "tio/interaction.hpp"

namespace tio {

// Scripted scene: a textured object and a hand moving over a noise
// background, with a contact-state schedule, detector jitter/dropout, and
// occlusion windows during which the object detection vanishes while the
// ground truth (and the rendered object) persist.
struct SyntheticSceneSpec {
    double image_w = 200.0;
    double image_h = 150.0;
    int frames = 0;
    std::uint64_t seed = 1;
    std::string scene_tag = "synthetic";

    std::vector<Box> object_boxes;          // per frame
    std::vector<Box> hand_boxes;            // per frame
    std::vector<ContactState> hand_states;  // per frame
    HandSide hand_side = HandSide::right;

    std::vector<std::pair<int, int>> occlusion_windows;  // inclusive ranges
    int distractors = 0;
    double det_noise = 0.5;         // detector box jitter, pixels
    double rel_noise = 0.25;        // jitter on the hand-to-object target
    double dropout = 0.0;           // random object-detection dropout
    double background_noise = 0.08;
    int annotate_every = 1;

    void validate() const;
    bool occluded(int t) const;
};

// Deterministic photometric rendering: stride 1, three channels, textures
// fixed per sequence so appearance is consistent across frames.
class SceneRenderer {
  public:
    explicit SceneRenderer(SyntheticSceneSpec spec);

    FeatureMap frame(std::int64_t t) const;
    const SyntheticSceneSpec& spec() const { return spec_; }
    const std::vector<Box>& distractor_boxes() const { return distractor_boxes_; }

  private:
    struct Texture {
        int h = 0;
        int w = 0;
        std::vector<float> values;  // h*w*3
        float sample(double u, double v, int c) const;
    };

    SyntheticSceneSpec spec_;
    Texture object_tex_;
    Texture hand_tex_;
    std::vector<Box> distractor_boxes_;
    std::vector<Texture> distractor_tex_;

    void paint(Tensor3& image, const Box& box, const Texture& tex) const;
};

struct SyntheticSequence {
    std::vector<FrameDetections> detections;
    std::vector<GroundTruthFrame> ground_truth;
};

// Detections and ground truth for the scripted scene; bit-identical for a
// fixed spec.
SyntheticSequence synthesize_sequence(const SyntheticSceneSpec& spec);

// JSON scene description. Trajectories are either explicit
// ("trajectory": [[x,y,w,h], ...]) or generated ("box0" plus "velocity").
SyntheticSceneSpec load_scene_spec(const std::string& path);

// Renders everything to disk: features/<frame>.ft1, detections.jsonl,
// annotations.jsonl, and manifest.json. Returns the manifest path.
std::string materialize_sequence(const SyntheticSceneSpec& spec,
                                 const std::string& out_dir,
                                 const std::string& sequence_id = "synthetic");

}  // namespace tio
