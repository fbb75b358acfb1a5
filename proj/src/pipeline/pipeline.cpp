#include "olab/pipeline/pipeline.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "olab/core/json_io.hpp"
#include "olab/generator/render.hpp"
#include "olab/oracle/oracle.hpp"

namespace olab::pipeline {

namespace {

constexpr std::array<std::string_view, 6> kStageNames{"gen", "validate", "train", "predict", "stats", "reduce"};
constexpr std::size_t kMaxListedViolations = 20;

}  // namespace

std::string_view nameOf(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

Stage stageFromString(std::string_view name) {
    for (std::size_t i = 0; i < kStageNames.size(); ++i) {
        if (kStageNames[i] == name) return kAllStages[i];
    }
    throw std::invalid_argument("unknown stage: " + std::string(name));
}

metric::TrainSpec PipelineConfig::deskTrainSpec() {
    metric::TrainSpec spec;
    spec.denseWidth = 256;
    spec.maxEpochs = 30;
    spec.earlyStopPatience = 5;
    return spec;
}

nlohmann::json toJson(const PipelineConfig& c) {
    return {{"workDir", c.workDir.string()},
            {"dataset",
             {{"scale", gen::nameOf(c.dataset.scale)},
              {"deskCount", c.dataset.deskCount},
              {"splitRatios", c.dataset.splitRatios},
              {"masterSeed", c.dataset.masterSeed},
              {"triples", c.dataset.triples}}},
            {"writeImages", c.writeImages},
            {"train", metric::toJson(c.train)},
            {"trainSeed", c.trainSeed},
            {"predictSplit", c.predictSplit},
            {"rules", reducer::toJson(c.rules)},
            {"trialSeed", c.trialSeed},
            {"alphaOverall", c.alphaOverall},
            {"alphaPerType", c.alphaPerType}};
}

PipelineConfig pipelineConfigFromJson(const nlohmann::json& j) {
    static const std::set<std::string> known{"workDir", "dataset",      "writeImages", "train",        "trainSeed",
                                             "predictSplit", "rules", "trialSeed",   "alphaOverall", "alphaPerType"};
    if (!j.is_object()) throw std::invalid_argument("pipeline config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw std::invalid_argument("unknown pipeline config key: " + key);
    }
    PipelineConfig c;
    if (j.contains("workDir")) c.workDir = j.at("workDir").get<std::string>();
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        if (d.contains("scale")) c.dataset.scale = gen::scaleFromString(d.at("scale").get<std::string>());
        c.dataset.deskCount = d.value("deskCount", c.dataset.deskCount);
        c.dataset.splitRatios = d.value("splitRatios", c.dataset.splitRatios);
        c.dataset.masterSeed = d.value("masterSeed", c.dataset.masterSeed);
        if (d.contains("triples")) c.dataset.triples = d.at("triples").get<std::vector<TypeTriple>>();
    }
    c.writeImages = j.value("writeImages", c.writeImages);
    if (j.contains("train")) c.train = metric::trainSpecFromJson(j.at("train"));
    c.trainSeed = j.value("trainSeed", c.trainSeed);
    c.predictSplit = j.value("predictSplit", c.predictSplit);
    gen::splitFromString(c.predictSplit);
    if (j.contains("rules")) c.rules = reducer::rulesFromJson(j.at("rules"));
    c.trialSeed = j.value("trialSeed", c.trialSeed);
    c.alphaOverall = j.value("alphaOverall", c.alphaOverall);
    c.alphaPerType = j.value("alphaPerType", c.alphaPerType);
    metric::checkSpec(c.train);
    reducer::checkRules(c.rules);
    for (double a : {c.alphaOverall, c.alphaPerType}) {
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    return c;
}

PipelineConfig loadPipelineConfig(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read config " + file.string());
    return pipelineConfigFromJson(nlohmann::json::parse(in));
}

std::string configHash(const PipelineConfig& config) {
    auto j = toJson(config);
    j.erase("workDir");
    return contentHash(j);
}

std::filesystem::path resolveDataPath(const std::filesystem::path& p) {
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv("OLAB_DATA_ROOT"); root && *root) return std::filesystem::path(root) / p;
    return p;
}

nlohmann::json toJson(const ValidationSummary& s) {
    return {{"checked", s.checked}, {"invalid", s.invalid}, {"violations", s.violations}, {"fromImages", s.fromImages}};
}

ValidationSummary validateManifest(const gen::Manifest& manifest, const std::filesystem::path& dataset, bool fromImages) {
    ValidationSummary s;
    s.fromImages = fromImages;
    for (const auto& e : manifest.entries) {
        oracle::OracleReport report;
        if (fromImages) {
            const auto cells = oracle::decodeRaster(gen::readPng(dataset / e.imagePath));
            report = oracle::validateGrid(oracle::Cells(cells), e.config);
        } else {
            report = oracle::validateGrid(gen::entryGrid(e), e.config);
        }
        ++s.checked;
        if (report.valid) continue;
        ++s.invalid;
        for (const auto& v : report.violations) {
            if (s.violations.size() < kMaxListedViolations) s.violations.push_back(e.id + ": " + v);
        }
    }
    return s;
}

void writeStamped(const std::filesystem::path& file, nlohmann::json body, const std::string& hash) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    body["configHash"] = hash;
    std::ofstream out(file);
    out << body.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + file.string());
}

nlohmann::json readStamped(const std::filesystem::path& file, std::string* hash) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    auto j = nlohmann::json::parse(in);
    if (hash) *hash = j.value("configHash", "");
    return j;
}

StageError::StageError(Stage stage, const std::string& message, std::vector<std::string> artifacts)
    : std::runtime_error([&] {
          std::string m = "stage " + std::string(nameOf(stage)) + " failed: " + message + " (artifacts present:";
          if (artifacts.empty()) m += " none";
          for (const auto& a : artifacts) m += " " + a;
          return m + ")";
      }()),
      stage_(stage),
      artifacts_(std::move(artifacts)) {}

namespace {

std::vector<std::string> presentArtifacts(const Layout& layout) {
    std::vector<std::string> out;
    auto check = [&](const std::filesystem::path& p, const char* name) {
        if (std::filesystem::exists(p)) out.emplace_back(name);
    };
    check(gen::manifestFile(layout.dataset()), "manifest");
    check(layout.dataset() / "images", "images");
    check(layout.validation(), "validation");
    check(layout.model() / "weights.bin", "model");
    check(layout.predictions(), "predictions");
    check(layout.difficulty(), "difficulty");
    check(layout.trialSet(), "trialset");
    return out;
}

bool stampMatches(const Layout& layout, Stage stage, const std::string& hash) {
    if (!std::filesystem::exists(layout.stamp(stage))) return false;
    std::string h;
    readStamped(layout.stamp(stage), &h);
    return h == hash;
}

metric::ImageProvider imagesFor(const PipelineConfig& config, const gen::Manifest& manifest, const Layout& layout) {
    return config.writeImages ? metric::directoryImages(layout.dataset()) : metric::renderedImages(manifest.header.render);
}

void runStage(Stage stage, const PipelineConfig& config, const Layout& layout, const std::string& hash,
              const std::function<void(const std::string&)>& progress) {
    auto say = [&](const std::string& m) {
        if (progress) progress(m);
    };
    switch (stage) {
        case Stage::Gen: {
            auto manifest = gen::buildManifest(config.dataset);
            manifest.header.configHash = hash;
            std::filesystem::remove_all(layout.dataset());
            gen::saveManifest(manifest, layout.dataset());
            if (config.writeImages) {
                gen::writeImages(manifest, layout.dataset(), [&](std::size_t done, std::size_t total) {
                    if (done % 1000 == 0 || done == total) say("rendered " + std::to_string(done) + "/" + std::to_string(total));
                });
            }
            say("manifest: " + std::to_string(manifest.entries.size()) + " entries");
            break;
        }
        case Stage::Validate: {
            const auto manifest = gen::loadManifest(layout.dataset());
            const auto summary = validateManifest(manifest, layout.dataset(), config.writeImages);
            writeStamped(layout.validation(), toJson(summary), hash);
            say("validated " + std::to_string(summary.checked) + " entries, " + std::to_string(summary.invalid) + " invalid");
            if (summary.invalid > 0) {
                throw std::runtime_error(std::to_string(summary.invalid) + " entries fail the oracle, first: " + summary.violations.front());
            }
            break;
        }
        case Stage::Train: {
            const auto manifest = gen::loadManifest(layout.dataset());
            auto model = metric::trainModel(manifest, config.train, config.trainSeed, imagesFor(config, manifest, layout),
                                            [&](const metric::EpochLog& e) {
                                                say("epoch " + std::to_string(e.epoch) + " loss " + std::to_string(e.trainLoss) +
                                                    " val acc " + std::to_string(e.validationAccuracy));
                                            });
            model.manifestHash = hash;
            metric::saveModel(model, layout.model());
            break;
        }
        case Stage::Predict: {
            const auto manifest = gen::loadManifest(layout.dataset());
            const auto model = metric::loadModel(layout.model());
            const auto records = metric::predict(model, manifest, gen::splitFromString(config.predictSplit),
                                                 imagesFor(config, manifest, layout));
            metric::writePredictions(records, layout.predictions());
            say("predicted " + std::to_string(records.size()) + " entries");
            break;
        }
        case Stage::Stats: {
            const auto report =
                metric::buildDifficultyReport(metric::readPredictions(layout.predictions()), config.alphaOverall, config.alphaPerType);
            writeStamped(layout.difficulty(), metric::toJson(report), hash);
            say("test accuracy " + std::to_string(report.accuracy) + ", MCC " + std::to_string(report.mcc));
            break;
        }
        case Stage::Reduce: {
            const auto difficulty = metric::difficultyReportFromJson(readStamped(layout.difficulty()));
            const auto manifest = gen::loadManifest(layout.dataset());
            const auto reduction = reducer::reduceParameterSpace(config.rules, &difficulty.tables);
            const auto set = reducer::selectTrialImages(reduction.cells, manifest, config.trialSeed, config.rules.trialsPerCombination);
            auto j = reducer::toJson(set);
            nlohmann::json notes = nlohmann::json::array();
            for (const auto& x : reduction.justifications) notes.push_back({{"parameter", x.parameter}, {"value", x.value}, {"note", x.note}});
            j["justifications"] = notes;
            writeStamped(layout.trialSet(), j, hash);
            say("trial set: " + std::to_string(set.trials.size()) + " evaluation trials");
            break;
        }
    }
}

}  // namespace

RunResult runPipeline(const PipelineConfig& config, const RunOptions& options) {
    const Layout layout{resolveDataPath(config.workDir)};
    RunResult result;
    result.configHash = configHash(config);
    std::filesystem::create_directories(layout.root);
    writeStamped(layout.root / "config.json", toJson(config), result.configHash);
    bool upstreamRan = false;
    for (auto stage : kAllStages) {
        if (options.resume && !upstreamRan && stampMatches(layout, stage, result.configHash)) {
            result.skipped.push_back(stage);
        } else {
            // Everything downstream of a rerun stage is stale.
            std::filesystem::remove(layout.stamp(stage));
            try {
                runStage(stage, config, layout, result.configHash, options.progress);
            } catch (const StageError&) {
                throw;
            } catch (const std::exception& e) {
                throw StageError(stage, e.what(), presentArtifacts(layout));
            }
            writeStamped(layout.stamp(stage), {{"stage", nameOf(stage)}}, result.configHash);
            result.ran.push_back(stage);
            upstreamRan = true;
        }
        if (options.stopAfter && *options.stopAfter == stage) break;
    }
    return result;
}

}  // namespace olab::pipeline
