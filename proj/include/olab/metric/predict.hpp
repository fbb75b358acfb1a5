#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/generator/dataset.hpp"
#include "olab/metric/train.hpp"
#include "olab/stats/report.hpp"

namespace olab::metric {

struct PredictionRecord {
    std::string entryId;
    int predictedPos = 0;
    int truePos = 0;
    bool correct = false;
    GridConfig config;
};

using Classifier = std::function<int(const gen::Image&)>;

/// One record per entry of `split`, in manifest order.
std::vector<PredictionRecord> predictWith(const Classifier& classify, const gen::Manifest& manifest, gen::Split split,
                                          const ImageProvider& images);
std::vector<PredictionRecord> predict(const ModelArtifact& model, const gen::Manifest& manifest, gen::Split split,
                                      const ImageProvider& images);

nlohmann::json toJson(const PredictionRecord& record);
PredictionRecord predictionFromJson(const nlohmann::json& j);
void writePredictions(const std::vector<PredictionRecord>& records, const std::filesystem::path& file);
std::vector<PredictionRecord> readPredictions(const std::filesystem::path& file);

/// Multiclass Matthews correlation over the 64-class confusion matrix.
/// A zero denominator (e.g. a single class in truth and prediction) gives 0
/// and a warning.
double computeMcc(const std::vector<PredictionRecord>& records);

struct DifficultyReport {
    std::size_t count = 0;
    double accuracy = 0.0;
    double errorRate = 0.0;
    double mcc = 0.0;
    /// ER tables built from per-combination error rates, overall (alpha 0.05)
    /// and per type (alpha 0.025), one row per feasible value.
    stats::PerformanceReport tables;
};

/// Per-combination ER sequences: predictions grouped by (type, c, s, outlier
/// color, outlier shape), one ER value per combination.
std::vector<stats::Observation> combinationErrorRates(const std::vector<PredictionRecord>& records);

DifficultyReport buildDifficultyReport(const std::vector<PredictionRecord>& records, double alphaOverall = 0.05,
                                       double alphaPerType = 0.025);

nlohmann::json toJson(const DifficultyReport& report);
DifficultyReport difficultyReportFromJson(const nlohmann::json& j);

}  // namespace olab::metric
