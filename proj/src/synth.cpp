#include "tio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "tio/formats.hpp"

namespace tio {

namespace {

bool inside_image(const Box& b, double w, double h) {
    return b.x >= 0.0 && b.y >= 0.0 && b.right() <= w && b.bottom() <= h;
}

std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t stream) {
    // splitmix-style stream separation
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return std::mt19937_64(z ^ (z >> 31));
}

}  // namespace

void SyntheticSceneSpec::validate() const {
    if (frames < 1) throw SceneSpecError("scene needs at least one frame");
    if (!(image_w > 0 && image_h > 0)) throw SceneSpecError("bad image dims");
    if (static_cast<int>(object_boxes.size()) != frames ||
        static_cast<int>(hand_boxes.size()) != frames ||
        static_cast<int>(hand_states.size()) != frames) {
        throw SceneSpecError("trajectory lengths must equal the frame count");
    }
    for (int t = 0; t < frames; ++t) {
        if (!object_boxes[static_cast<std::size_t>(t)].valid() ||
            !inside_image(object_boxes[static_cast<std::size_t>(t)], image_w, image_h)) {
            throw SceneSpecError("object trajectory leaves the image at frame " +
                                 std::to_string(t));
        }
        if (!hand_boxes[static_cast<std::size_t>(t)].valid() ||
            !inside_image(hand_boxes[static_cast<std::size_t>(t)], image_w, image_h)) {
            throw SceneSpecError("hand trajectory leaves the image at frame " +
                                 std::to_string(t));
        }
    }
    for (const auto& [a, b] : occlusion_windows) {
        if (a > b) throw SceneSpecError("occlusion window start after end");
    }
    if (annotate_every < 1) throw SceneSpecError("annotate_every must be >= 1");
    if (!(dropout >= 0.0 && dropout <= 1.0)) throw SceneSpecError("dropout must lie in [0,1]");
}

bool SyntheticSceneSpec::occluded(int t) const {
    for (const auto& [a, b] : occlusion_windows) {
        if (t >= a && t <= b) return true;
    }
    return false;
}

float SceneRenderer::Texture::sample(double u, double v, int c) const {
    // bilinear over the texture grid, clamped at the edges
    const double x = std::clamp(u, 0.0, 1.0) * (w - 1);
    const double y = std::clamp(v, 0.0, 1.0) * (h - 1);
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    auto at = [&](int yy, int xx) {
        return values[(static_cast<std::size_t>(yy) * w + xx) * 3 + c];
    };
    const double top = (1 - fx) * at(y0, x0) + fx * at(y0, x1);
    const double bot = (1 - fx) * at(y1, x0) + fx * at(y1, x1);
    return static_cast<float>((1 - fy) * top + fy * bot);
}

SceneRenderer::SceneRenderer(SyntheticSceneSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    auto make_texture = [](std::mt19937_64& rng, int size, float lo, float hi) {
        Texture tex;
        tex.h = tex.w = size;
        tex.values.resize(static_cast<std::size_t>(size) * size * 3);
        std::uniform_real_distribution<float> dist(lo, hi);
        for (float& v : tex.values) v = dist(rng);
        return tex;
    };

    auto rng = rng_for(spec_.seed, 0);
    object_tex_ = make_texture(rng, 16, 0.3f, 1.0f);
    hand_tex_ = make_texture(rng, 12, 0.25f, 0.8f);

    // Static distractor patches, kept clear of the object trajectory so they
    // distract the detector pool rather than corrupt the ground truth.
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int d = 0; d < spec_.distractors; ++d) {
        Box box;
        bool placed = false;
        for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
            box.w = 14.0 + 20.0 * ux(rng);
            box.h = 14.0 + 20.0 * ux(rng);
            box.x = ux(rng) * (spec_.image_w - box.w);
            box.y = ux(rng) * (spec_.image_h - box.h);
            placed = std::all_of(spec_.object_boxes.begin(), spec_.object_boxes.end(),
                                 [&](const Box& ob) { return iou(box, ob) == 0.0; });
        }
        if (!placed) continue;
        distractor_boxes_.push_back(box);
        distractor_tex_.push_back(make_texture(rng, 12, 0.3f, 1.0f));
    }
}

void SceneRenderer::paint(Tensor3& image, const Box& box, const Texture& tex) const {
    // pixel centers sit at integer coordinates; coverage is [edge, edge+extent)
    const int y_begin = std::max(0, static_cast<int>(std::ceil(box.y)));
    const int y_end = std::min(image.height() - 1, static_cast<int>(std::ceil(box.bottom())) - 1);
    const int x_begin = std::max(0, static_cast<int>(std::ceil(box.x)));
    const int x_end = std::min(image.width() - 1, static_cast<int>(std::ceil(box.right())) - 1);
    for (int y = y_begin; y <= y_end; ++y) {
        const double v = (y - box.y) / box.h;
        for (int x = x_begin; x <= x_end; ++x) {
            const double u = (x - box.x) / box.w;
            for (int c = 0; c < 3; ++c) {
                image.at(y, x, c) = tex.sample(u, v, c);
            }
        }
    }
}

FeatureMap SceneRenderer::frame(std::int64_t t) const {
    if (t < 0 || t >= spec_.frames) {
        throw SequencingError("renderer: frame index out of range");
    }
    const int w = static_cast<int>(std::lround(spec_.image_w));
    const int h = static_cast<int>(std::lround(spec_.image_h));
    Tensor3 image(h, w, 3);

    auto rng = rng_for(spec_.seed, 1000 + static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<float> noise(0.0f,
                                                static_cast<float>(spec_.background_noise));
    for (float& v : image.data()) v = noise(rng);

    for (std::size_t d = 0; d < distractor_boxes_.size(); ++d) {
        paint(image, distractor_boxes_[d], distractor_tex_[d]);
    }
    paint(image, spec_.hand_boxes[static_cast<std::size_t>(t)], hand_tex_);
    paint(image, spec_.object_boxes[static_cast<std::size_t>(t)], object_tex_);

    return FeatureMap{std::move(image), 1.0, spec_.image_w, spec_.image_h};
}

SyntheticSequence synthesize_sequence(const SyntheticSceneSpec& spec) {
    spec.validate();
    const SceneRenderer renderer(spec);  // fixes the distractor layout

    auto rng = rng_for(spec.seed, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto jitter_box = [&](const Box& b, double amp) {
        auto u = [&]() { return (unit(rng) * 2.0 - 1.0) * amp; };
        const double dx = u();
        const double dy = u();
        const double dw = u() * 0.5;
        const double dh = u() * 0.5;
        return Box{b.x + dx, b.y + dy, std::max(1.0, b.w + dw), std::max(1.0, b.h + dh)};
    };

    SyntheticSequence seq;
    for (int t = 0; t < spec.frames; ++t) {
        const Box& object_gt = spec.object_boxes[static_cast<std::size_t>(t)];
        const Box& hand_gt = spec.hand_boxes[static_cast<std::size_t>(t)];
        const ContactState state = spec.hand_states[static_cast<std::size_t>(t)];

        FrameDetections det;
        det.frame_index = t;

        HandDetection hand;
        hand.box = jitter_box(hand_gt, spec.det_noise);
        hand.score = 0.88 + 0.1 * unit(rng);
        hand.side = spec.hand_side;
        hand.contact_state = state;
        if (contacts_object(state)) {
            hand.predicted_rel =
                encode_hand_to_object(hand.box, jitter_box(object_gt, spec.rel_noise));
        }
        det.hands.push_back(hand);

        const bool drop = spec.occluded(t) || unit(rng) < spec.dropout;
        if (!drop) {
            det.objects.push_back(ObjectCandidate{jitter_box(object_gt, spec.det_noise),
                                                  0.75 + 0.2 * unit(rng),
                                                  CandidateSource::detector});
        }
        for (const Box& db : renderer.distractor_boxes()) {
            det.objects.push_back(ObjectCandidate{jitter_box(db, spec.det_noise),
                                                  0.3 + 0.3 * unit(rng),
                                                  CandidateSource::detector});
        }

        GroundTruthFrame gt;
        gt.frame_index = t;
        gt.annotated = (t % spec.annotate_every) == 0;
        gt.scene_tag = spec.scene_tag;
        GroundTruthHand gh;
        gh.box = hand_gt;
        gh.side = spec.hand_side;
        gh.contact_state = state;
        if (state != ContactState::no_contact) gh.object_box = object_gt;
        gt.hands.push_back(gh);

        seq.detections.push_back(std::move(det));
        seq.ground_truth.push_back(std::move(gt));
    }
    return seq;
}

namespace {

using nlohmann::json;

std::vector<Box> trajectory_from_json(const json& j, int frames, const char* what) {
    std::vector<Box> boxes;
    if (j.contains("trajectory")) {
        for (const auto& jb : j.at("trajectory")) {
            boxes.push_back(Box{jb.at(0).get<double>(), jb.at(1).get<double>(),
                                jb.at(2).get<double>(), jb.at(3).get<double>()});
        }
        if (static_cast<int>(boxes.size()) != frames) {
            throw SceneSpecError(std::string(what) + ": trajectory length mismatch");
        }
        return boxes;
    }
    const auto& b0 = j.at("box0");
    const double vx = j.contains("velocity") ? j.at("velocity").at(0).get<double>() : 0.0;
    const double vy = j.contains("velocity") ? j.at("velocity").at(1).get<double>() : 0.0;
    Box box{b0.at(0).get<double>(), b0.at(1).get<double>(), b0.at(2).get<double>(),
            b0.at(3).get<double>()};
    for (int t = 0; t < frames; ++t) {
        boxes.push_back(box);
        box.x += vx;
        box.y += vy;
    }
    return boxes;
}

std::vector<std::pair<int, int>> windows_from_json(const json& j) {
    std::vector<std::pair<int, int>> out;
    for (const auto& w : j) {
        out.emplace_back(w.at(0).get<int>(), w.at(1).get<int>());
    }
    return out;
}

}  // namespace

SyntheticSceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene spec: ") + e.what());
    }

    SyntheticSceneSpec spec;
    try {
        spec.image_w = j.at("image").at(0).get<double>();
        spec.image_h = j.at("image").at(1).get<double>();
        spec.frames = j.at("frames").get<int>();
        spec.seed = j.value("seed", 1ull);
        spec.scene_tag = j.value("scene", std::string("synthetic"));
        spec.object_boxes = trajectory_from_json(j.at("object"), spec.frames, "object");
        const auto& hand = j.at("hand");
        spec.hand_boxes = trajectory_from_json(hand, spec.frames, "hand");
        spec.hand_side = hand_side_from_string(hand.value("side", std::string("r")));
        const ContactState contact_state =
            contact_state_from_string(hand.value("state", std::string("portable")));
        spec.hand_states.assign(static_cast<std::size_t>(spec.frames), contact_state);
        if (hand.contains("no_contact")) {
            for (const auto& [a, b] : windows_from_json(hand.at("no_contact"))) {
                for (int t = std::max(a, 0); t <= std::min(b, spec.frames - 1); ++t) {
                    spec.hand_states[static_cast<std::size_t>(t)] = ContactState::no_contact;
                }
            }
        }
        if (j.contains("occlusion")) {
            spec.occlusion_windows = windows_from_json(j.at("occlusion"));
        }
        spec.distractors = j.value("distractors", 0);
        spec.det_noise = j.value("det_noise", 0.5);
        spec.rel_noise = j.value("rel_noise", 0.25);
        spec.dropout = j.value("dropout", 0.0);
        spec.background_noise = j.value("background_noise", 0.08);
        spec.annotate_every = j.value("annotate_every", 1);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string materialize_sequence(const SyntheticSceneSpec& spec, const std::string& out_dir,
                                 const std::string& sequence_id) {
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    fs::create_directories(root / "features");

    const SceneRenderer renderer(spec);
    for (int t = 0; t < spec.frames; ++t) {
        write_ft1_file(ft1_frame_path((root / "features").string(), t),
                       renderer.frame(t).map);
    }

    const SyntheticSequence seq = synthesize_sequence(spec);
    save_detections((root / "detections.jsonl").string(), seq.detections);
    save_annotations((root / "annotations.jsonl").string(), seq.ground_truth);

    SequenceManifest manifest;
    manifest.sequence_id = sequence_id;
    manifest.frame_count = spec.frames;
    manifest.image_w = spec.image_w;
    manifest.image_h = spec.image_h;
    manifest.stride = 1.0;
    manifest.feature_kind = "ft1_dir";
    manifest.feature_path = "features";
    manifest.detections_path = "detections.jsonl";
    manifest.annotations_path = "annotations.jsonl";
    const std::string manifest_path = (root / "manifest.json").string();
    save_manifest(manifest_path, manifest);
    return manifest_path;
}

}  // namespace tio
