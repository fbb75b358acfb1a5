#include "olab/metric/train.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace olab::metric {

void checkSpec(const TrainSpec& spec) {
    if (spec.numClasses != kGridCells) throw std::invalid_argument("numClasses must be 64");
    if (spec.pretrained) throw std::invalid_argument("pretrained weights are not available; set pretrained=false");
    if (spec.batchSize < 1) throw std::invalid_argument("batchSize must be positive");
    if (spec.earlyStopPatience < 0) throw std::invalid_argument("earlyStopPatience must be >= 0");
    if (spec.maxEpochs < 1) throw std::invalid_argument("maxEpochs must be positive");
    if (spec.denseWidth < 1) throw std::invalid_argument("denseWidth must be positive");
    Network probe({spec.backbone, spec.inputSize, 1}, 0);  // validates inputSize
}

nlohmann::json toJson(const TrainSpec& spec) {
    return {{"backbone", nameOf(spec.backbone)},
            {"pretrained", spec.pretrained},
            {"inputSize", spec.inputSize},
            {"batchSize", spec.batchSize},
            {"earlyStopPatience", spec.earlyStopPatience},
            {"denseWidth", spec.denseWidth},
            {"numClasses", spec.numClasses},
            {"maxEpochs", spec.maxEpochs},
            {"shuffleLabels", spec.shuffleLabels},
            {"optimizer",
             {{"name", "adam"},
              {"learningRate", spec.optimizer.learningRate},
              {"beta1", spec.optimizer.beta1},
              {"beta2", spec.optimizer.beta2},
              {"epsilon", spec.optimizer.epsilon}}}};
}

TrainSpec trainSpecFromJson(const nlohmann::json& j) {
    TrainSpec spec;
    if (j.contains("backbone")) spec.backbone = backboneFromString(j.at("backbone").get<std::string>());
    spec.pretrained = j.value("pretrained", spec.pretrained);
    spec.inputSize = j.value("inputSize", spec.inputSize);
    spec.batchSize = j.value("batchSize", spec.batchSize);
    spec.earlyStopPatience = j.value("earlyStopPatience", spec.earlyStopPatience);
    spec.denseWidth = j.value("denseWidth", spec.denseWidth);
    spec.numClasses = j.value("numClasses", spec.numClasses);
    spec.maxEpochs = j.value("maxEpochs", spec.maxEpochs);
    spec.shuffleLabels = j.value("shuffleLabels", spec.shuffleLabels);
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        spec.optimizer.learningRate = o.value("learningRate", spec.optimizer.learningRate);
        spec.optimizer.beta1 = o.value("beta1", spec.optimizer.beta1);
        spec.optimizer.beta2 = o.value("beta2", spec.optimizer.beta2);
        spec.optimizer.epsilon = o.value("epsilon", spec.optimizer.epsilon);
    }
    return spec;
}

ImageProvider directoryImages(const std::filesystem::path& dir) {
    return [dir](const gen::ManifestEntry& entry) {
        try {
            return gen::readPng(dir / entry.imagePath);
        } catch (const std::exception& e) {
            throw std::runtime_error("entry " + entry.id + ": " + e.what());
        }
    };
}

ImageProvider renderedImages(const gen::RenderSpec& render) {
    return [render](const gen::ManifestEntry& entry) { return gen::renderGrid(gen::entryGrid(entry), render); };
}

std::vector<std::uint8_t> downsample(const gen::Image& image, int inputSize) {
    if (image.width() != image.height() || inputSize < 1 || image.width() % inputSize != 0) {
        throw std::invalid_argument("image size " + std::to_string(image.width()) + " is not a multiple of inputSize " +
                                    std::to_string(inputSize));
    }
    const int f = image.width() / inputSize;
    const auto bytes = image.bytes();
    std::vector<std::uint8_t> out(static_cast<std::size_t>(3) * inputSize * inputSize);
    for (int y = 0; y < inputSize; ++y) {
        for (int x = 0; x < inputSize; ++x) {
            unsigned sum[3] = {0, 0, 0};
            for (int dy = 0; dy < f; ++dy) {
                for (int dx = 0; dx < f; ++dx) {
                    const std::size_t i = (static_cast<std::size_t>(y * f + dy) * image.width() + static_cast<std::size_t>(x * f + dx)) * 3;
                    for (int c = 0; c < 3; ++c) sum[c] += bytes[i + static_cast<std::size_t>(c)];
                }
            }
            for (int c = 0; c < 3; ++c) {
                out[(static_cast<std::size_t>(c) * inputSize + y) * inputSize + x] =
                    static_cast<std::uint8_t>((sum[c] + static_cast<unsigned>(f * f / 2)) / static_cast<unsigned>(f * f));
            }
        }
    }
    return out;
}

Tensor toTensor(const std::vector<std::uint8_t>& pixels, int inputSize) {
    Tensor t(3, inputSize, inputSize);
    if (pixels.size() != t.data.size()) throw std::invalid_argument("pixel buffer does not match inputSize");
    for (std::size_t i = 0; i < pixels.size(); ++i) t.data[i] = 1.0f - static_cast<float>(pixels[i]) / 255.0f;
    return t;
}

nlohmann::json toJson(const TrainingLog& log) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : log.epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"trainLoss", e.trainLoss},
                          {"trainAccuracy", e.trainAccuracy},
                          {"validationLoss", e.validationLoss},
                          {"validationAccuracy", e.validationAccuracy},
                          {"improved", e.improved}});
    }
    return {{"epochs", epochs},
            {"bestEpoch", log.bestEpoch},
            {"bestValidationAccuracy", log.bestValidationAccuracy},
            {"stoppedEarly", log.stoppedEarly}};
}

TrainingLog trainingLogFromJson(const nlohmann::json& j) {
    TrainingLog log;
    for (const auto& e : j.at("epochs")) {
        log.epochs.push_back({e.at("epoch").get<int>(), e.at("trainLoss").get<double>(), e.at("trainAccuracy").get<double>(),
                              e.at("validationLoss").get<double>(), e.at("validationAccuracy").get<double>(),
                              e.at("improved").get<bool>()});
    }
    log.bestEpoch = j.at("bestEpoch").get<int>();
    log.bestValidationAccuracy = j.at("bestValidationAccuracy").get<double>();
    log.stoppedEarly = j.at("stoppedEarly").get<bool>();
    return log;
}

int ModelArtifact::classify(const gen::Image& image) const {
    if (!network) throw std::logic_error("model has no network");
    return argmax(network->forward(toTensor(downsample(image, spec.inputSize), spec.inputSize)));
}

namespace {

struct Sample {
    std::vector<std::uint8_t> pixels;
    int label = 0;
};

std::vector<Sample> loadSplit(const std::vector<const gen::ManifestEntry*>& entries, const ImageProvider& images, int inputSize) {
    std::vector<Sample> out;
    out.reserve(entries.size());
    for (const auto* e : entries) out.push_back({downsample(images(*e), inputSize), e->groundTruth()});
    return out;
}

std::pair<double, double> evaluate(Network& net, const std::vector<Sample>& samples, int inputSize) {
    double loss = 0.0;
    std::size_t correct = 0;
    Logits d{};
    for (const auto& s : samples) {
        const auto logits = net.forward(toTensor(s.pixels, inputSize));
        loss += softmaxCrossEntropy(logits, s.label, d);
        if (argmax(logits) == s.label) ++correct;
    }
    const auto n = static_cast<double>(samples.size());
    return {loss / n, static_cast<double>(correct) / n};
}

}  // namespace

ModelArtifact trainModel(const gen::Manifest& manifest, const TrainSpec& spec, std::uint64_t seed, const ImageProvider& images,
                         const EpochCallback& onEpoch) {
    checkSpec(spec);
    const auto trainEntries = manifest.inSplit(gen::Split::Train);
    const auto valEntries = manifest.inSplit(gen::Split::Validation);
    if (trainEntries.empty()) throw std::invalid_argument("training split is empty");
    if (valEntries.empty()) throw std::invalid_argument("validation split is empty");

    auto train = loadSplit(trainEntries, images, spec.inputSize);
    auto validation = loadSplit(valEntries, images, spec.inputSize);
    if (spec.shuffleLabels) {
        // Validation labels are permuted too, so checkpoint selection cannot
        // pick an epoch by its fit to the true positions.
        Engine labelRng(deriveSeed(seed, "label-shuffle"));
        for (auto* split : {&train, &validation}) {
            std::vector<int> labels;
            for (const auto& s : *split) labels.push_back(s.label);
            shuffleInPlace(labels, labelRng);
            for (std::size_t i = 0; i < split->size(); ++i) (*split)[i].label = labels[i];
        }
    }

    ModelArtifact model;
    model.spec = spec;
    model.seed = seed;
    model.manifestHash = manifest.header.configHash;
    model.network = std::make_unique<Network>(NetworkShape{spec.backbone, spec.inputSize, spec.denseWidth}, deriveSeed(seed, "init"));
    Network& net = *model.network;
    Adam adam(spec.optimizer);
    auto params = net.params();
    net.zeroGrad();

    Engine orderRng(deriveSeed(seed, "order"));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    auto best = net.snapshot();
    double bestAcc = -1.0;
    int sinceImprovement = 0;
    for (int epoch = 1; epoch <= spec.maxEpochs; ++epoch) {
        shuffleInPlace(order, orderRng);
        double loss = 0.0;
        std::size_t correct = 0;
        Logits d{};
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(spec.batchSize)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(spec.batchSize));
            for (std::size_t k = start; k < end; ++k) {
                const auto& s = train[order[k]];
                const auto logits = net.forward(toTensor(s.pixels, spec.inputSize));
                loss += softmaxCrossEntropy(logits, s.label, d);
                if (argmax(logits) == s.label) ++correct;
                net.backward(d);
            }
            adam.step(params, 1.0f / static_cast<float>(end - start));
        }
        EpochLog entry;
        entry.epoch = epoch;
        entry.trainLoss = loss / static_cast<double>(train.size());
        entry.trainAccuracy = static_cast<double>(correct) / static_cast<double>(train.size());
        std::tie(entry.validationLoss, entry.validationAccuracy) = evaluate(net, validation, spec.inputSize);
        entry.improved = entry.validationAccuracy > bestAcc;
        if (entry.improved) {
            bestAcc = entry.validationAccuracy;
            best = net.snapshot();
            model.log.bestEpoch = epoch;
            sinceImprovement = 0;
        } else {
            ++sinceImprovement;
        }
        model.log.epochs.push_back(entry);
        if (onEpoch) onEpoch(entry);
        if (sinceImprovement > spec.earlyStopPatience) {
            model.log.stoppedEarly = true;
            break;
        }
    }
    net.restore(best);
    model.log.bestValidationAccuracy = bestAcc;
    return model;
}

void saveModel(const ModelArtifact& model, const std::filesystem::path& dir) {
    if (!model.network) throw std::logic_error("model has no network");
    std::filesystem::create_directories(dir);
    const nlohmann::json meta = {{"format", "olab-model/1"},
                                 {"toolVersion", gen::kToolVersion},
                                 {"spec", toJson(model.spec)},
                                 {"seed", model.seed},
                                 {"manifestHash", model.manifestHash},
                                 {"parameterCount", model.network->parameterCount()},
                                 {"bestEpoch", model.log.bestEpoch},
                                 {"metrics", {{"bestValidationAccuracy", model.log.bestValidationAccuracy}}},
                                 {"log", toJson(model.log)}};
    std::ofstream metaOut(dir / "metadata.json");
    metaOut << meta.dump(2) << '\n';
    if (!metaOut) throw std::runtime_error("cannot write " + (dir / "metadata.json").string());
    std::ofstream weights(dir / "weights.bin", std::ios::binary);
    if (!weights) throw std::runtime_error("cannot write " + (dir / "weights.bin").string());
    model.network->writeWeights(weights);
}

ModelArtifact loadModel(const std::filesystem::path& dir) {
    std::ifstream metaIn(dir / "metadata.json");
    if (!metaIn) throw std::runtime_error("no model metadata in " + dir.string());
    const auto meta = nlohmann::json::parse(metaIn);
    ModelArtifact model;
    model.spec = trainSpecFromJson(meta.at("spec"));
    model.seed = meta.at("seed").get<std::uint64_t>();
    model.manifestHash = meta.value("manifestHash", "");
    model.log = trainingLogFromJson(meta.at("log"));
    model.network = std::make_unique<Network>(NetworkShape{model.spec.backbone, model.spec.inputSize, model.spec.denseWidth}, 0);
    std::ifstream weights(dir / "weights.bin", std::ios::binary);
    if (!weights) throw std::runtime_error("no weights in " + dir.string());
    model.network->readWeights(weights);
    return model;
}

}  // namespace olab::metric
