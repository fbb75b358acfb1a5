#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/generator/dataset.hpp"
#include "olab/metric/network.hpp"

namespace olab::metric {

struct TrainSpec {
    Backbone backbone = Backbone::SmallCnn;
    bool pretrained = false;
    int inputSize = 64;
    int batchSize = 64;
    int earlyStopPatience = 15;
    int denseWidth = 1024;
    int numClasses = kGridCells;
    int maxEpochs = 100;
    AdamOptions optimizer;
    /// Control run: training labels are permuted, so nothing can be learned.
    bool shuffleLabels = false;
};

/// Throws std::invalid_argument when the spec cannot be trained.
void checkSpec(const TrainSpec& spec);
nlohmann::json toJson(const TrainSpec& spec);
TrainSpec trainSpecFromJson(const nlohmann::json& j);

using ImageProvider = std::function<gen::Image(const gen::ManifestEntry&)>;
/// Reads `dir / entry.imagePath`; decode failures name the entry.
ImageProvider directoryImages(const std::filesystem::path& dir);
/// Renders each entry from its config and seed.
ImageProvider renderedImages(const gen::RenderSpec& render = {});

/// Block-averaged, channel-major bytes of size 3 * inputSize^2.
std::vector<std::uint8_t> downsample(const gen::Image& image, int inputSize);
/// Ink intensity in [0, 1] (white background maps to 0).
Tensor toTensor(const std::vector<std::uint8_t>& pixels, int inputSize);

struct EpochLog {
    int epoch = 0;
    double trainLoss = 0.0;
    double trainAccuracy = 0.0;
    double validationLoss = 0.0;
    double validationAccuracy = 0.0;
    bool improved = false;
};

struct TrainingLog {
    std::vector<EpochLog> epochs;
    int bestEpoch = 0;
    double bestValidationAccuracy = 0.0;
    bool stoppedEarly = false;
};

nlohmann::json toJson(const TrainingLog& log);
TrainingLog trainingLogFromJson(const nlohmann::json& j);

struct ModelArtifact {
    TrainSpec spec;
    std::uint64_t seed = 0;
    std::string manifestHash;
    TrainingLog log;
    std::unique_ptr<Network> network;

    /// Class prediction for one image.
    int classify(const gen::Image& image) const;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Trains a position classifier with early stopping on validation accuracy.
/// The best-epoch weights are kept. Deterministic for a given seed.
ModelArtifact trainModel(const gen::Manifest& manifest, const TrainSpec& spec, std::uint64_t seed,
                         const ImageProvider& images, const EpochCallback& onEpoch = {});

/// metadata.json plus weights.bin.
void saveModel(const ModelArtifact& model, const std::filesystem::path& dir);
ModelArtifact loadModel(const std::filesystem::path& dir);

}  // namespace olab::metric
