#pragma once

#include <memory>
#include <string>

#include "tio/feature_map.hpp"
#include "tio/formats.hpp"
#include "tio/synth.hpp"

namespace tio {

// Frame-feature source. Implementations must be deterministic per index so
// whole runs stay reproducible.
class FeatureProvider {
  public:
    virtual ~FeatureProvider() = default;
    virtual FeatureMap frame(std::int64_t index) = 0;
};

// Reads features/frame_NNNNNN.ft1 files.
class Ft1DirProvider : public FeatureProvider {
  public:
    Ft1DirProvider(std::string dir, double stride, double image_w, double image_h);
    FeatureMap frame(std::int64_t index) override;

  private:
    std::string dir_;
    double stride_;
    double image_w_;
    double image_h_;
};

// Renders image-as-feature frames straight from a scene spec.
class PhotometricProvider : public FeatureProvider {
  public:
    explicit PhotometricProvider(SyntheticSceneSpec spec);
    FeatureMap frame(std::int64_t index) override;

  private:
    SceneRenderer renderer_;
};

// Spawns a command per frame; the command must write an FT1 file to the
// path substituted for {out} ({frame} carries the index). Keeps neural
// backbones out of process.
class ExternalProcessProvider : public FeatureProvider {
  public:
    ExternalProcessProvider(std::string command_template, double stride, double image_w,
                            double image_h);
    FeatureMap frame(std::int64_t index) override;

  private:
    std::string command_template_;
    double stride_;
    double image_w_;
    double image_h_;
};

// Provider matching the manifest's feature kind.
std::unique_ptr<FeatureProvider> make_feature_provider(const SequenceManifest& manifest);

}  // namespace tio
