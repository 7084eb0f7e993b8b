#include "tio/providers.hpp"

#include <cstdlib>
#include <filesystem>

namespace tio {

Ft1DirProvider::Ft1DirProvider(std::string dir, double stride, double image_w,
                               double image_h)
    : dir_(std::move(dir)), stride_(stride), image_w_(image_w), image_h_(image_h) {}

FeatureMap Ft1DirProvider::frame(std::int64_t index) {
    Tensor3 map = read_ft1_file(ft1_frame_path(dir_, index));
    return FeatureMap{std::move(map), stride_, image_w_, image_h_};
}

PhotometricProvider::PhotometricProvider(SyntheticSceneSpec spec)
    : renderer_(std::move(spec)) {}

FeatureMap PhotometricProvider::frame(std::int64_t index) {
    return renderer_.frame(index);
}

ExternalProcessProvider::ExternalProcessProvider(std::string command_template,
                                                 double stride, double image_w,
                                                 double image_h)
    : command_template_(std::move(command_template)),
      stride_(stride),
      image_w_(image_w),
      image_h_(image_h) {}

namespace {

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    for (std::size_t pos = text.find(key); pos != std::string::npos;
         pos = text.find(key, pos + value.size())) {
        text.replace(pos, key.size(), value);
    }
    return text;
}

}  // namespace

FeatureMap ExternalProcessProvider::frame(std::int64_t index) {
    namespace fs = std::filesystem;
    const fs::path out_path =
        fs::temp_directory_path() /
        ("tio_feature_" + std::to_string(static_cast<long long>(index)) + "_" +
         std::to_string(static_cast<unsigned long long>(
             reinterpret_cast<std::uintptr_t>(this))) +
         ".ft1");

    std::string command = substitute(command_template_, "{frame}", std::to_string(index));
    command = substitute(command, "{out}", out_path.string());
    const int rc = std::system(command.c_str());
    if (rc != 0) {
        throw Error("external feature command failed (exit " + std::to_string(rc) +
                    "): " + command);
    }
    Tensor3 map = read_ft1_file(out_path.string());
    std::error_code ec;
    fs::remove(out_path, ec);
    return FeatureMap{std::move(map), stride_, image_w_, image_h_};
}

std::unique_ptr<FeatureProvider> make_feature_provider(const SequenceManifest& manifest) {
    if (manifest.feature_kind == "ft1_dir") {
        return std::make_unique<Ft1DirProvider>(manifest.feature_path, manifest.stride,
                                                manifest.image_w, manifest.image_h);
    }
    if (manifest.feature_kind == "photometric") {
        return std::make_unique<PhotometricProvider>(load_scene_spec(manifest.feature_path));
    }
    if (manifest.feature_kind == "external") {
        return std::make_unique<ExternalProcessProvider>(
            manifest.feature_path, manifest.stride, manifest.image_w, manifest.image_h);
    }
    throw ConfigError("unknown feature kind: " + manifest.feature_kind);
}

}  // namespace tio
