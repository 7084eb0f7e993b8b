#include "tio/formats.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tio {

namespace {

using nlohmann::json;

json box_to_json(const Box& b) { return json::array({b.x, b.y, b.w, b.h}); }

Box box_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ParseError("box must be [x,y,w,h]");
    Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (!b.valid()) throw ParseError("box extent must be positive and finite");
    return b;
}

json rel_to_json(const HandToObject& r) { return json::array({r.dx, r.dy, r.dw, r.dh}); }

HandToObject rel_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ParseError("rel must be [dx,dy,dw,dh]");
    return HandToObject{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                        j[3].get<double>()};
}

double score_from_json(const json& j, const char* what) {
    const double s = j.get<double>();
    if (!(s >= 0.0 && s <= 1.0)) {
        throw ParseError(std::string(what) + " score must lie in [0, 1]");
    }
    return s;
}

json parse_line(const std::string& line, long line_number) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad record: ") + e.what(), line_number);
    }
}

// Runs `fn` per non-empty line, converting any tio::Error into a ParseError
// carrying the line number, and enforcing strictly increasing frame indices.
template <typename Record, typename Fn>
std::vector<Record> parse_lines(std::istream& in, Fn fn) {
    std::vector<Record> out;
    std::string line;
    long line_number = 0;
    std::int64_t prev_frame = -1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        Record rec;
        try {
            rec = fn(parse_line(line, line_number));
        } catch (const ParseError& e) {
            if (e.line_number >= 0) throw;
            throw ParseError(e.what(), line_number);
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad record: ") + e.what(), line_number);
        }
        if (rec.frame_index <= prev_frame) {
            throw SequencingError("frame indices must be strictly increasing (line " +
                                  std::to_string(line_number) + ")");
        }
        prev_frame = rec.frame_index;
        out.push_back(std::move(rec));
    }
    return out;
}

template <typename Record, typename Fn>
std::vector<Record> load_lines(const std::string& path, Fn fn) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    return parse_lines<Record>(in, fn);
}

template <typename Record>
void save_lines(const std::string& path, const std::vector<Record>& records,
                std::string (*to_line)(const Record&)) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for write: " + path);
    for (const auto& r : records) out << to_line(r) << '\n';
    if (!out) throw Error("write failed: " + path);
}

FrameDetections detections_from_json(const json& j) {
    FrameDetections fd;
    fd.frame_index = j.at("frame").get<std::int64_t>();
    for (const auto& h : j.value("hands", json::array())) {
        HandDetection hd;
        hd.box = box_from_json(h.at("box"));
        hd.score = score_from_json(h.at("score"), "hand");
        hd.side = hand_side_from_string(h.at("side").get<std::string>());
        hd.contact_state = contact_state_from_string(h.at("state").get<std::string>());
        hd.predicted_rel = rel_from_json(h.at("rel"));
        fd.hands.push_back(hd);
    }
    for (const auto& o : j.value("objects", json::array())) {
        ObjectCandidate oc;
        oc.box = box_from_json(o.at("box"));
        oc.score = score_from_json(o.at("score"), "object");
        oc.source = CandidateSource::detector;
        fd.objects.push_back(oc);
    }
    return fd;
}

GroundTruthFrame annotation_from_json(const json& j) {
    GroundTruthFrame gt;
    gt.frame_index = j.at("frame").get<std::int64_t>();
    gt.annotated = j.value("annotated", true);
    gt.scene_tag = j.value("scene", std::string());
    for (const auto& h : j.value("hands", json::array())) {
        GroundTruthHand gh;
        gh.box = box_from_json(h.at("box"));
        gh.side = hand_side_from_string(h.at("side").get<std::string>());
        gh.contact_state = contact_state_from_string(h.at("state").get<std::string>());
        if (h.contains("object_box") && !h.at("object_box").is_null()) {
            gh.object_box = box_from_json(h.at("object_box"));
        }
        gt.hands.push_back(gh);
    }
    return gt;
}

FrameResult result_from_json(const json& j) {
    FrameResult fr;
    fr.frame_index = j.at("frame").get<std::int64_t>();
    for (const auto& h : j.value("hands", json::array())) {
        FrameResult::HandResult hr;
        hr.hand.box = box_from_json(h.at("box"));
        hr.hand.score = score_from_json(h.at("score"), "hand");
        hr.hand.side = hand_side_from_string(h.at("side").get<std::string>());
        hr.hand.contact_state = contact_state_from_string(h.at("state").get<std::string>());
        if (h.contains("object_id") && !h.at("object_id").is_null()) {
            hr.object_id = h.at("object_id").get<std::uint64_t>();
        }
        fr.hands.push_back(hr);
    }
    for (const auto& o : j.value("objects", json::array())) {
        FrameResult::ObjectResult orr;
        orr.object_id = o.at("id").get<std::uint64_t>();
        orr.box = box_from_json(o.at("box"));
        orr.confidence = o.at("confidence").get<double>();
        const std::string source = o.at("source").get<std::string>();
        if (source == "det") orr.source = CandidateSource::detector;
        else if (source == "trk") orr.source = CandidateSource::tracker;
        else throw ParseError("unknown object source: " + source);
        fr.objects.push_back(orr);
    }
    return fr;
}

}  // namespace

std::vector<FrameDetections> parse_detections(std::istream& in) {
    return parse_lines<FrameDetections>(in, detections_from_json);
}

std::vector<FrameDetections> load_detections(const std::string& path) {
    return load_lines<FrameDetections>(path, detections_from_json);
}

std::string detections_to_line(const FrameDetections& frame) {
    json hands = json::array();
    for (const auto& h : frame.hands) {
        hands.push_back(json{{"box", box_to_json(h.box)},
                             {"score", h.score},
                             {"side", to_string(h.side)},
                             {"state", to_string(h.contact_state)},
                             {"rel", rel_to_json(h.predicted_rel)}});
    }
    json objects = json::array();
    for (const auto& o : frame.objects) {
        objects.push_back(json{{"box", box_to_json(o.box)}, {"score", o.score}});
    }
    return json{{"frame", frame.frame_index}, {"hands", hands}, {"objects", objects}}
        .dump();
}

void save_detections(const std::string& path, const std::vector<FrameDetections>& frames) {
    save_lines(path, frames, detections_to_line);
}

std::vector<GroundTruthFrame> parse_annotations(std::istream& in) {
    return parse_lines<GroundTruthFrame>(in, annotation_from_json);
}

std::vector<GroundTruthFrame> load_annotations(const std::string& path) {
    return load_lines<GroundTruthFrame>(path, annotation_from_json);
}

std::string annotation_to_line(const GroundTruthFrame& frame) {
    json hands = json::array();
    for (const auto& h : frame.hands) {
        json jh{{"box", box_to_json(h.box)},
                {"side", to_string(h.side)},
                {"state", to_string(h.contact_state)}};
        jh["object_box"] = h.object_box ? box_to_json(*h.object_box) : json(nullptr);
        hands.push_back(jh);
    }
    return json{{"frame", frame.frame_index},
                {"annotated", frame.annotated},
                {"scene", frame.scene_tag},
                {"hands", hands}}
        .dump();
}

void save_annotations(const std::string& path, const std::vector<GroundTruthFrame>& frames) {
    save_lines(path, frames, annotation_to_line);
}

std::vector<FrameResult> parse_results(std::istream& in) {
    return parse_lines<FrameResult>(in, result_from_json);
}

std::vector<FrameResult> load_results(const std::string& path) {
    return load_lines<FrameResult>(path, result_from_json);
}

std::string result_to_line(const FrameResult& frame) {
    json hands = json::array();
    for (const auto& h : frame.hands) {
        json jh{{"box", box_to_json(h.hand.box)},
                {"score", h.hand.score},
                {"side", to_string(h.hand.side)},
                {"state", to_string(h.hand.contact_state)}};
        jh["object_id"] = h.object_id ? json(*h.object_id) : json(nullptr);
        hands.push_back(jh);
    }
    json objects = json::array();
    for (const auto& o : frame.objects) {
        objects.push_back(json{{"id", o.object_id},
                               {"box", box_to_json(o.box)},
                               {"confidence", o.confidence},
                               {"source", o.source == CandidateSource::detector ? "det"
                                                                                : "trk"}});
    }
    return json{{"frame", frame.frame_index}, {"hands", hands}, {"objects", objects}}
        .dump();
}

void save_results(const std::string& path, const std::vector<FrameResult>& frames) {
    save_lines(path, frames, result_to_line);
}

std::vector<PredictionRecord> results_to_predictions(
    const std::vector<FrameResult>& results) {
    std::vector<PredictionRecord> out;
    out.reserve(results.size());
    for (const auto& fr : results) {
        PredictionRecord rec;
        rec.frame_index = fr.frame_index;
        for (const auto& h : fr.hands) {
            PredictedHand ph;
            ph.box = h.hand.box;
            ph.score = h.hand.score;
            ph.side = h.hand.side;
            ph.contact_state = h.hand.contact_state;
            if (h.object_id) {
                for (const auto& o : fr.objects) {
                    if (o.object_id == *h.object_id) {
                        ph.object_box = o.box;
                        ph.object_score = o.confidence;
                        break;
                    }
                }
            }
            rec.hands.push_back(ph);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

PipelineConfig parse_config(std::istream& in) {
    PipelineConfig config;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'key = value'", line_number);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "nms_iou") config.nms_iou = std::stod(value);
            else if (key == "miss_tolerance") config.miss_tolerance = std::stoi(value);
            else if (key == "min_det_score") config.min_det_score = std::stod(value);
            else if (key == "search_factor") config.search_factor = std::stod(value);
            else if (key == "template_update") {
                if (value != "every_frame") {
                    throw ParseError("template_update must be 'every_frame'", line_number);
                }
            } else if (key == "compatibility_floor") {
                if (value == "none") config.compatibility_floor.reset();
                else config.compatibility_floor = std::stod(value);
            } else {
                throw ParseError("unknown config key: " + key, line_number);
            }
        } catch (const std::invalid_argument&) {
            throw ParseError("bad numeric value for " + key, line_number);
        }
    }
    config.validate();
    return config;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    return parse_config(in);
}

std::string config_to_string(const PipelineConfig& config) {
    std::ostringstream out;
    out << "nms_iou = " << config.nms_iou << '\n';
    out << "miss_tolerance = " << config.miss_tolerance << '\n';
    out << "min_det_score = " << config.min_det_score << '\n';
    out << "search_factor = " << config.search_factor << '\n';
    out << "template_update = every_frame\n";
    out << "compatibility_floor = ";
    if (config.compatibility_floor) out << *config.compatibility_floor;
    else out << "none";
    out << '\n';
    return out.str();
}

namespace {

std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return fp.string();
    return (base / fp).lexically_normal().string();
}

}  // namespace

SequenceManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }

    SequenceManifest m;
    try {
        m.sequence_id = j.value("sequence_id", std::string("unnamed"));
        m.frame_count = j.at("frames").get<std::int64_t>();
        m.image_w = j.at("image").at(0).get<double>();
        m.image_h = j.at("image").at(1).get<double>();
        m.stride = j.value("stride", 1.0);
        const auto& feat = j.at("features");
        m.feature_kind = feat.at("kind").get<std::string>();
        m.feature_path = feat.at("path").get<std::string>();
        m.detections_path = j.at("detections").get<std::string>();
        if (j.contains("annotations") && !j.at("annotations").is_null()) {
            m.annotations_path = j.at("annotations").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: ") + e.what());
    }

    if (m.frame_count < 1) throw ParseError("manifest: frame count must be >= 1");
    if (!(m.image_w > 0 && m.image_h > 0)) throw ParseError("manifest: bad image dims");
    if (!(m.stride > 0)) throw ParseError("manifest: stride must be positive");
    if (m.feature_kind != "ft1_dir" && m.feature_kind != "photometric" &&
        m.feature_kind != "external") {
        throw ParseError("manifest: unknown feature kind: " + m.feature_kind);
    }

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    if (m.feature_kind != "external") {
        m.feature_path = resolve_path(base, m.feature_path);
    }
    m.detections_path = resolve_path(base, m.detections_path);
    if (m.annotations_path) m.annotations_path = resolve_path(base, *m.annotations_path);

    // referenced inputs must resolve now, not at frame time
    if (!std::filesystem::exists(m.detections_path)) {
        throw Error("manifest: detections file not found: " + m.detections_path);
    }
    if (m.annotations_path && !std::filesystem::exists(*m.annotations_path)) {
        throw Error("manifest: annotations file not found: " + *m.annotations_path);
    }
    if (m.feature_kind == "ft1_dir") {
        const std::string first = ft1_frame_path(m.feature_path, 0);
        if (!std::filesystem::exists(first)) {
            throw Error("manifest: feature file not found: " + first);
        }
    } else if (m.feature_kind == "photometric" &&
               !std::filesystem::exists(m.feature_path)) {
        throw Error("manifest: scene spec not found: " + m.feature_path);
    }
    return m;
}

void save_manifest(const std::string& path, const SequenceManifest& manifest) {
    json j{{"sequence_id", manifest.sequence_id},
           {"frames", manifest.frame_count},
           {"image", json::array({manifest.image_w, manifest.image_h})},
           {"stride", manifest.stride},
           {"features", json{{"kind", manifest.feature_kind},
                             {"path", manifest.feature_path}}},
           {"detections", manifest.detections_path}};
    j["annotations"] = manifest.annotations_path ? json(*manifest.annotations_path)
                                                 : json(nullptr);
    std::ofstream out(path);
    if (!out) throw Error("cannot open for write: " + path);
    out << j.dump(2) << '\n';
}

std::string ft1_frame_path(const std::string& dir, std::int64_t frame_index) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06lld.ft1",
                  static_cast<long long>(frame_index));
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace tio
