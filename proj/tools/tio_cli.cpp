#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <unordered_map>

#include <CLI11.hpp>

#include "tio/eval.hpp"
#include "tio/formats.hpp"
#include "tio/pipeline.hpp"
#include "tio/providers.hpp"
#include "tio/selftest.hpp"
#include "tio/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSelftest = 3;

// Detection records may be sparse; the pipeline wants one per frame.
std::vector<tio::FrameDetections> densify(std::vector<tio::FrameDetections> records,
                                          std::int64_t frame_count) {
    std::unordered_map<std::int64_t, std::size_t> by_frame;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].frame_index < 0 || records[i].frame_index >= frame_count) {
            throw tio::SequencingError("detection frame index outside the sequence");
        }
        by_frame.emplace(records[i].frame_index, i);
    }
    std::vector<tio::FrameDetections> dense(static_cast<std::size_t>(frame_count));
    for (std::int64_t t = 0; t < frame_count; ++t) {
        const auto it = by_frame.find(t);
        if (it != by_frame.end()) {
            dense[static_cast<std::size_t>(t)] = std::move(records[it->second]);
        } else {
            dense[static_cast<std::size_t>(t)].frame_index = t;
        }
    }
    return dense;
}

int cmd_track(const std::string& manifest_path, const std::string& out_path,
              const std::string& config_path) {
    const tio::SequenceManifest manifest = tio::load_manifest(manifest_path);
    tio::PipelineConfig config;
    if (!config_path.empty()) config = tio::load_config(config_path);

    const auto provider = tio::make_feature_provider(manifest);
    const auto detections =
        densify(tio::load_detections(manifest.detections_path), manifest.frame_count);

    std::ofstream out(out_path);
    if (!out) throw tio::Error("cannot open for write: " + out_path);

    const tio::DecodingHead head = tio::DecodingHead::analytic();
    std::int64_t written = 0;
    tio::run_sequence(
        manifest.frame_count, [&](std::int64_t t) { return provider->frame(t); },
        detections, config, head, [&](const tio::FrameResult& fr) {
            out << tio::result_to_line(fr) << '\n';
            ++written;
        });
    out.close();
    if (!out) throw tio::Error("write failed: " + out_path);
    std::printf("tracked %lld frames of '%s' -> %s\n", static_cast<long long>(written),
                manifest.sequence_id.c_str(), out_path.c_str());
    return kExitOk;
}

void print_metric(const char* key, double value) {
    std::printf("%s %.6f\n", key, value);
}

int cmd_eval(const std::string& pred_path, const std::string& gt_path, double tau,
             bool per_scene, bool eleven_point) {
    const auto results = tio::load_results(pred_path);
    const auto preds = tio::results_to_predictions(results);
    const auto gts = tio::load_annotations(gt_path);
    const tio::ApVariant variant =
        eleven_point ? tio::ApVariant::eleven_point : tio::ApVariant::all_point;
    const tio::FullStateReport report =
        tio::full_state_map(preds, gts, tau, variant, per_scene);

    std::printf("ap_variant %s\n", eleven_point ? "eleven_point" : "all_point");
    std::printf("tau %.6f\n", tau);
    std::printf("annotated_frames %zu\n", report.annotated_frames);
    std::printf("gt_hands %zu\n", report.total_gt_hands);
    std::printf("gt_objects %zu\n", report.total_gt_objects);
    print_metric("hand_ap", report.hand_ap);
    print_metric("hstate_ap", report.hstate_ap);
    print_metric("hside_ap", report.hside_ap);
    print_metric("object_ap", report.object_ap);
    print_metric("all_map", report.all_map);
    for (const auto& [state, ap] : report.state_object_ap) {
        std::printf("state_object_ap %s %.6f\n", tio::to_string(state), ap);
    }
    if (per_scene) {
        for (const auto& [tag, ap] : report.scene_object_ap) {
            std::printf("scene_object_ap %s %.6f\n", tag.c_str(), ap);
        }
    }
    return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    const tio::SyntheticSceneSpec spec = tio::load_scene_spec(spec_path);
    const std::string manifest = tio::materialize_sequence(spec, out_dir);
    std::printf("synthesized %d frames -> %s\n", spec.frames, manifest.c_str());
    return kExitOk;
}

int cmd_bench_xcorr(int channels, int iters) {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    tio::Tensor3 search(tio::kSearchSize, tio::kSearchSize, channels);
    tio::Tensor3 tmpl(tio::kTemplateSize, tio::kTemplateSize, channels);
    for (float& v : search.data()) v = dist(rng);
    for (float& v : tmpl.data()) v = dist(rng);

    double sink = 0.0;
    for (int warm = 0; warm < 2; ++warm) {
        sink += tio::depthwise_xcorr(search, tmpl).at(0, 0, 0);
    }
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) {
        sink += tio::depthwise_xcorr(search, tmpl).at(i % 16, 0, 0);
    }
    const auto stop = std::chrono::steady_clock::now();
    const double total_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    std::printf("xcorr %dx%dx%d vs %dx%dx%d, %d iters (checksum %.3f)\n",
                tio::kSearchSize, tio::kSearchSize, channels, tio::kTemplateSize,
                tio::kTemplateSize, channels, iters, sink);
    std::printf("per_call_ms %.4f\n", total_ms / iters);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tio: hand-interaction object tracking pipeline"};
    app.require_subcommand(1);

    // track
    auto* track = app.add_subcommand("track", "run the tracking pipeline on a sequence");
    std::string manifest_path;
    std::string out_path;
    std::string config_path;
    bool print_config = false;
    track->add_option("manifest", manifest_path, "sequence manifest (json)");
    track->add_option("--out", out_path, "output results file (jsonl)");
    track->add_option("--config", config_path, "pipeline config file");
    track->add_flag("--print-config", print_config, "print the default config and exit");

    // eval
    auto* eval = app.add_subcommand("eval", "score results against annotations");
    std::string pred_path;
    std::string gt_path;
    double tau = 0.5;
    bool per_scene = false;
    bool eleven_point = false;
    eval->add_option("--pred", pred_path, "results file (jsonl)")->required();
    eval->add_option("--gt", gt_path, "annotations file (jsonl)")->required();
    eval->add_option("--tau", tau, "IoU threshold (default 0.5)");
    eval->add_flag("--per-scene", per_scene, "add a per-scene breakdown");
    eval->add_flag("--eleven-point", eleven_point, "use 11-point interpolated AP");

    // synth
    auto* synth = app.add_subcommand("synth", "materialize a synthetic sequence");
    std::string spec_path;
    std::string out_dir;
    synth->add_option("spec", spec_path, "scene spec (json)")->required();
    synth->add_option("--out-dir", out_dir, "output directory")->required();

    // bench-xcorr
    auto* bench = app.add_subcommand("bench-xcorr", "time the correlation kernel");
    int channels = 256;
    int iters = 20;
    bench->add_option("--channels", channels, "channel count (default 256)");
    bench->add_option("--iters", iters, "iterations (default 20)");

    // selftest
    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (track->parsed()) {
            if (print_config) {
                std::fputs(tio::config_to_string(tio::PipelineConfig{}).c_str(), stdout);
                return kExitOk;
            }
            if (manifest_path.empty() || out_path.empty()) {
                std::fputs("track requires a manifest and --out\n", stderr);
                return kExitUsage;
            }
            return cmd_track(manifest_path, out_path, config_path);
        }
        if (eval->parsed()) {
            if (!(tau > 0.0 && tau < 1.0)) {
                std::fputs("--tau must lie in (0, 1)\n", stderr);
                return kExitUsage;
            }
            return cmd_eval(pred_path, gt_path, tau, per_scene, eleven_point);
        }
        if (synth->parsed()) return cmd_synth(spec_path, out_dir);
        if (bench->parsed()) {
            if (channels < 1 || iters < 1) {
                std::fputs("--channels and --iters must be >= 1\n", stderr);
                return kExitUsage;
            }
            return cmd_bench_xcorr(channels, iters);
        }
        if (selftest->parsed()) {
            const int failures = tio::run_selftest(std::cout);
            if (failures > 0) {
                std::fprintf(stderr, "%d selftest check(s) failed\n", failures);
                return kExitSelftest;
            }
            return kExitOk;
        }
    } catch (const tio::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}
