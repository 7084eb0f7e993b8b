#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tio/eval.hpp"
#include "tio/interaction.hpp"
#include "tio/pipeline.hpp"

namespace tio {

// --- line-delimited detection records -------------------------------------
// {"frame":0,"hands":[{"box":[x,y,w,h],"score":s,"side":"l","state":"portable",
//  "rel":[dx,dy,dw,dh]}],"objects":[{"box":[...],"score":s}]}

std::vector<FrameDetections> load_detections(const std::string& path);
std::vector<FrameDetections> parse_detections(std::istream& in);
void save_detections(const std::string& path, const std::vector<FrameDetections>& frames);
std::string detections_to_line(const FrameDetections& frame);

// --- line-delimited annotation records -------------------------------------
// {"frame":0,"annotated":true,"scene":"tag","hands":[{"box":[...],"side":"l",
//  "state":"portable","object_box":[...]|null}]}

std::vector<GroundTruthFrame> load_annotations(const std::string& path);
std::vector<GroundTruthFrame> parse_annotations(std::istream& in);
void save_annotations(const std::string& path, const std::vector<GroundTruthFrame>& frames);
std::string annotation_to_line(const GroundTruthFrame& frame);

// --- line-delimited tracking results ---------------------------------------
// {"frame":0,"hands":[{"box":[...],"score":s,"side":"l","state":"portable",
//  "object_id":1|null}],"objects":[{"id":1,"box":[...],"confidence":c,
//  "source":"det"|"trk"}]}

std::vector<FrameResult> load_results(const std::string& path);
std::vector<FrameResult> parse_results(std::istream& in);
void save_results(const std::string& path, const std::vector<FrameResult>& frames);
std::string result_to_line(const FrameResult& frame);

// Reshape emitted results into evaluation records (hands with their linked
// object boxes resolved by id).
std::vector<PredictionRecord> results_to_predictions(const std::vector<FrameResult>& results);

// --- pipeline config file ---------------------------------------------------
// key = value lines, '#' comments. Keys mirror PipelineConfig.

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(std::istream& in);
std::string config_to_string(const PipelineConfig& config);

// --- sequence manifest -------------------------------------------------------
// Single JSON object describing one runnable sequence.

struct SequenceManifest {
    std::string sequence_id;
    std::int64_t frame_count = 0;
    double image_w = 0.0;
    double image_h = 0.0;
    double stride = 1.0;
    std::string feature_kind;          // "ft1_dir" | "photometric" | "external"
    std::string feature_path;          // dir pattern / scene spec / command
    std::string detections_path;
    std::optional<std::string> annotations_path;
};

// Loads and validates a manifest; referenced files must resolve. Relative
// paths are resolved against the manifest's directory.
SequenceManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const SequenceManifest& manifest);

// Path of the FT1 feature file for one frame under a ft1_dir provider.
std::string ft1_frame_path(const std::string& dir, std::int64_t frame_index);

}  // namespace tio
