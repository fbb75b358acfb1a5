#include "olab/metric/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include "olab/core/json_io.hpp"
#include "olab/core/log.hpp"

namespace olab::metric {

std::vector<PredictionRecord> predictWith(const Classifier& classify, const gen::Manifest& manifest, gen::Split split,
                                          const ImageProvider& images) {
    const auto entries = manifest.inSplit(split);
    if (entries.empty()) throw std::invalid_argument(std::string("split ") + std::string(gen::nameOf(split)) + " is empty");
    std::vector<PredictionRecord> records;
    records.reserve(entries.size());
    for (const auto* e : entries) {
        PredictionRecord r;
        r.entryId = e->id;
        r.config = e->config;
        r.truePos = e->groundTruth();
        r.predictedPos = classify(images(*e));
        if (r.predictedPos < 0 || r.predictedPos >= kGridCells) throw std::out_of_range("classifier returned an invalid position");
        r.correct = r.predictedPos == r.truePos;
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<PredictionRecord> predict(const ModelArtifact& model, const gen::Manifest& manifest, gen::Split split,
                                      const ImageProvider& images) {
    return predictWith([&](const gen::Image& img) { return model.classify(img); }, manifest, split, images);
}

nlohmann::json toJson(const PredictionRecord& r) {
    return {{"entryId", r.entryId}, {"predictedPos", r.predictedPos}, {"truePos", r.truePos}, {"correct", r.correct}, {"config", r.config}};
}

PredictionRecord predictionFromJson(const nlohmann::json& j) {
    PredictionRecord r;
    r.entryId = j.at("entryId").get<std::string>();
    r.predictedPos = j.at("predictedPos").get<int>();
    r.truePos = j.at("truePos").get<int>();
    r.config = j.at("config").get<GridConfig>();
    r.correct = r.predictedPos == r.truePos;
    if (j.contains("correct") && j.at("correct").get<bool>() != r.correct) {
        throw std::invalid_argument("record " + r.entryId + ": correct flag disagrees with positions");
    }
    return r;
}

void writePredictions(const std::vector<PredictionRecord>& records, const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (const auto& r : records) out << toJson(r).dump() << '\n';
}

std::vector<PredictionRecord> readPredictions(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::vector<PredictionRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) records.push_back(predictionFromJson(nlohmann::json::parse(line)));
    }
    return records;
}

double computeMcc(const std::vector<PredictionRecord>& records) {
    if (records.empty()) throw std::invalid_argument("computeMcc needs at least one record");
    std::array<double, kGridCells> truth{}, predicted{};
    double correct = 0.0;
    for (const auto& r : records) {
        truth.at(static_cast<std::size_t>(r.truePos)) += 1.0;
        predicted.at(static_cast<std::size_t>(r.predictedPos)) += 1.0;
        if (r.predictedPos == r.truePos) correct += 1.0;
    }
    const double s = static_cast<double>(records.size());
    double pt = 0.0, pp = 0.0, tt = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        pt += predicted[k] * truth[k];
        pp += predicted[k] * predicted[k];
        tt += truth[k] * truth[k];
    }
    const double denom = std::sqrt(s * s - pp) * std::sqrt(s * s - tt);
    if (denom == 0.0) {
        warn("computeMcc: degenerate confusion matrix, MCC defined as 0");
        return 0.0;
    }
    return std::clamp((correct * s - pt) / denom, -1.0, 1.0);
}

std::vector<stats::Observation> combinationErrorRates(const std::vector<PredictionRecord>& records) {
    using Key = std::tuple<int, int, int, int, int>;
    std::map<Key, std::pair<GridConfig, std::pair<double, std::size_t>>> groups;
    for (const auto& r : records) {
        const Key key{static_cast<int>(r.config.type), r.config.nColors, r.config.nShapes, r.config.outlierColor.index(),
                      r.config.outlierShape.index()};
        auto& g = groups[key];
        g.first = r.config;
        g.second.first += r.correct ? 0.0 : 1.0;
        ++g.second.second;
    }
    std::vector<stats::Observation> out;
    out.reserve(groups.size());
    for (const auto& [key, g] : groups) {
        stats::Observation o;
        o.config = g.first;
        o.config.outlierPos = 0;
        o.error = g.second.first / static_cast<double>(g.second.second);
        out.push_back(std::move(o));
    }
    return out;
}

DifficultyReport buildDifficultyReport(const std::vector<PredictionRecord>& records, double alphaOverall, double alphaPerType) {
    if (records.empty()) throw std::invalid_argument("buildDifficultyReport needs records");
    DifficultyReport report;
    report.count = records.size();
    std::size_t correct = 0;
    for (const auto& r : records) correct += r.correct ? 1 : 0;
    report.accuracy = static_cast<double>(correct) / static_cast<double>(records.size());
    report.errorRate = 1.0 - report.accuracy;
    report.mcc = computeMcc(records);

    stats::ReportOptions options;
    options.parameters = {stats::Parameter::Type, stats::Parameter::NColors, stats::Parameter::NShapes,
                          stats::Parameter::OutlierColor, stats::Parameter::OutlierShape};
    options.measures = {stats::Measure::ER};
    options.fullDomain = true;
    options.alphaOverall = alphaOverall;
    options.alphaPerType = alphaPerType;
    report.tables = stats::buildPerformanceReport(combinationErrorRates(records), options);
    return report;
}

nlohmann::json toJson(const DifficultyReport& report) {
    return {{"count", report.count},
            {"accuracy", report.accuracy},
            {"errorRate", report.errorRate},
            {"mcc", report.mcc},
            {"tables", stats::toJson(report.tables)}};
}

DifficultyReport difficultyReportFromJson(const nlohmann::json& j) {
    DifficultyReport report;
    report.count = j.at("count").get<std::size_t>();
    report.accuracy = j.at("accuracy").get<double>();
    report.errorRate = j.at("errorRate").get<double>();
    report.mcc = j.at("mcc").get<double>();
    report.tables = stats::reportFromJson(j.at("tables"));
    return report;
}

}  // namespace olab::metric
