#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/generator/dataset.hpp"
#include "olab/metric/predict.hpp"
#include "olab/metric/train.hpp"
#include "olab/reducer/reducer.hpp"

namespace olab::pipeline {

enum class Stage { Gen, Validate, Train, Predict, Stats, Reduce };
inline constexpr std::array<Stage, 6> kAllStages{Stage::Gen, Stage::Validate, Stage::Train,
                                                 Stage::Predict, Stage::Stats, Stage::Reduce};
std::string_view nameOf(Stage stage);
Stage stageFromString(std::string_view name);

struct PipelineConfig {
    std::filesystem::path workDir = "olab-run";
    gen::DatasetOptions dataset;
    bool writeImages = true;
    metric::TrainSpec train = deskTrainSpec();
    std::uint64_t trainSeed = 1;
    std::string predictSplit = "test";
    reducer::ReductionRules rules;
    std::uint64_t trialSeed = 1;
    double alphaOverall = 0.05;
    double alphaPerType = 0.025;

    /// Training defaults sized for a laptop CPU.
    static metric::TrainSpec deskTrainSpec();
};

nlohmann::json toJson(const PipelineConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig pipelineConfigFromJson(const nlohmann::json& j);
PipelineConfig loadPipelineConfig(const std::filesystem::path& file);
/// Hash of the canonical JSON minus workDir, so moving a run keeps its hash.
std::string configHash(const PipelineConfig& config);

/// Resolves a relative path against the OLAB_DATA_ROOT environment variable
/// when it is set.
std::filesystem::path resolveDataPath(const std::filesystem::path& p);

struct Layout {
    std::filesystem::path root;
    std::filesystem::path dataset() const { return root / "dataset"; }
    std::filesystem::path validation() const { return root / "validation.json"; }
    std::filesystem::path model() const { return root / "model"; }
    std::filesystem::path predictions() const { return root / "predictions.jsonl"; }
    std::filesystem::path difficulty() const { return root / "difficulty.json"; }
    std::filesystem::path trialSet() const { return root / "trialset.json"; }
    std::filesystem::path stamp(Stage stage) const { return root / "stages" / (std::string(nameOf(stage)) + ".json"); }
};

struct ValidationSummary {
    std::size_t checked = 0;
    std::size_t invalid = 0;
    std::vector<std::string> violations;  ///< first few, prefixed by entry id
    bool fromImages = false;
};
nlohmann::json toJson(const ValidationSummary& s);

/// Re-derives every entry's ground truth with the oracle, either from the
/// synthesized grid or by decoding the rendered PNG under `dataset`.
ValidationSummary validateManifest(const gen::Manifest& manifest, const std::filesystem::path& dataset, bool fromImages);

/// JSON report file with the config hash embedded.
void writeStamped(const std::filesystem::path& file, nlohmann::json body, const std::string& hash);
/// Reads a stamped file; the hash is returned in `hash` when given.
nlohmann::json readStamped(const std::filesystem::path& file, std::string* hash = nullptr);

class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& message, std::vector<std::string> artifacts);
    Stage stage() const { return stage_; }
    const std::vector<std::string>& artifacts() const { return artifacts_; }

private:
    Stage stage_;
    std::vector<std::string> artifacts_;
};

struct RunOptions {
    std::optional<Stage> stopAfter;
    bool resume = true;  ///< skip stages whose stamp matches the config hash
    std::function<void(const std::string&)> progress;
};

struct RunResult {
    std::string configHash;
    std::vector<Stage> ran;
    std::vector<Stage> skipped;
};

/// gen -> validate -> train -> predict -> stats -> reduce. A failing stage
/// throws StageError naming the stage and the artifacts present.
RunResult runPipeline(const PipelineConfig& config, const RunOptions& options = {});

}  // namespace olab::pipeline
