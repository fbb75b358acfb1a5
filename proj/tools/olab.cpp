#include <csignal>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "olab/core/json_io.hpp"
#include "olab/figures/svg.hpp"
#include "olab/pipeline/pipeline.hpp"
#include "olab/stats/hypotheses.hpp"
#include "olab/stats/sensitivity.hpp"
#include "olab/study/analysis.hpp"
#include "olab/study/server.hpp"

using namespace olab;
namespace fs = std::filesystem;

namespace {

/// Nonzero exit with a message, without a stack of "terminate called" noise.
class ExitError : public std::runtime_error {
public:
    ExitError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

nlohmann::json readJson(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    return nlohmann::json::parse(in);
}

void writeJson(const fs::path& file, const nlohmann::json& j) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + file.string());
}

fs::path datasetDirOf(const fs::path& manifest) {
    return fs::is_directory(manifest) ? manifest : manifest.parent_path();
}

std::array<double, 3> parseSplits(const std::string& text) {
    std::array<double, 3> out{};
    std::stringstream ss(text);
    std::string part;
    std::size_t i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw CLI::ValidationError("--splits", "expects three comma-separated ratios");
        out[i++] = std::stod(part);
    }
    if (i != 3) throw CLI::ValidationError("--splits", "expects three comma-separated ratios");
    return out;
}

metric::ImageProvider imagesFor(const gen::Manifest& manifest, const fs::path& datasetDir) {
    if (fs::exists(datasetDir / "images")) return metric::directoryImages(datasetDir);
    return metric::renderedImages(manifest.header.render);
}

std::vector<std::string> splitList(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

std::string randomToken() {
    std::random_device rd;
    std::ostringstream o;
    for (int i = 0; i < 4; ++i) o << std::hex << rd();
    return o.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outlier visual-search lab: dataset generation, difficulty metric, study backend and analysis"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate the manifest and images");
    std::string scale = "desk", splits = "0.8,0.1,0.1";
    fs::path genOut;
    std::uint64_t genSeed = 1;
    std::size_t genCount = 6400;
    bool noImages = false;
    gen->add_option("--scale", scale, "full or desk")->check(CLI::IsMember({"full", "desk"}));
    gen->add_option("--out", genOut, "Output directory")->required();
    gen->add_option("--seed", genSeed, "Master seed");
    gen->add_option("--splits", splits, "train,validation,test ratios");
    gen->add_option("--count", genCount, "Entries at desk scale");
    gen->add_flag("--no-images", noImages, "Write the manifest only");

    // validate
    auto* validate = app.add_subcommand("validate", "Check every entry against the oracle");
    fs::path validateManifestPath;
    bool validateImages = false;
    validate->add_option("--manifest", validateManifestPath, "Manifest file or dataset directory")->required();
    validate->add_flag("--images", validateImages, "Decode the rendered PNGs instead of re-synthesizing grids");

    // train
    auto* train = app.add_subcommand("train", "Train the difficulty model");
    fs::path trainManifest, trainSpecFile, trainOut = "model";
    std::uint64_t trainSeed = 1;
    train->add_option("--manifest", trainManifest, "Manifest file or dataset directory")->required();
    train->add_option("--spec", trainSpecFile, "TrainSpec JSON");
    train->add_option("--seed", trainSeed, "Training seed");
    train->add_option("--out", trainOut, "Model directory");

    // predict
    auto* predictCmd = app.add_subcommand("predict", "Classify a split with a trained model");
    fs::path predictModel, predictManifest, predictOut = "predictions.jsonl";
    std::string predictSplit = "test";
    predictCmd->add_option("--model", predictModel, "Model directory")->required();
    predictCmd->add_option("--manifest", predictManifest, "Manifest file or dataset directory")->required();
    predictCmd->add_option("--split", predictSplit, "train, validation or test");
    predictCmd->add_option("--out", predictOut, "Predictions JSONL");

    // stats
    auto* statsCmd = app.add_subcommand("stats", "Difficulty or performance report from records");
    fs::path statsRecords, statsOut = "report.json";
    double alpha = 0.05, perTypeAlpha = 0.025;
    statsCmd->add_option("--records", statsRecords, "Predictions JSONL or trial records JSONL")->required();
    statsCmd->add_option("--alpha", alpha, "Overall significance level");
    statsCmd->add_option("--per-type-alpha", perTypeAlpha, "Per-type significance level");
    statsCmd->add_option("--out", statsOut, "Report JSON");

    // reduce
    auto* reduce = app.add_subcommand("reduce", "Reduce the design and pick the study trials");
    fs::path reduceReport, reduceManifest, reduceOut = "trialset.json", reduceRules;
    std::uint64_t reduceSeed = 1;
    reduce->add_option("--report", reduceReport, "Difficulty report JSON");
    reduce->add_option("--manifest", reduceManifest, "Manifest file or dataset directory")->required();
    reduce->add_option("--seed", reduceSeed, "Trial selection seed");
    reduce->add_option("--rules", reduceRules, "ReductionRules JSON");
    reduce->add_option("--out", reduceOut, "Trial set JSON");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the study backend");
    fs::path serveTrialSet, serveLog = "study-log", serveImages;
    int port = 8080;
    std::string host = "127.0.0.1", token;
    std::uint64_t serveSeed = 0;
    serve->add_option("--trialset", serveTrialSet, "Trial set JSON")->required();
    serve->add_option("--port", port, "TCP port");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--log", serveLog, "Event log directory");
    serve->add_option("--images", serveImages, "Dataset directory with rendered PNGs (rendered on demand otherwise)");
    serve->add_option("--token", token, "Operator token for the export endpoint (random if omitted)");
    serve->add_option("--seed", serveSeed, "Seed for session ids, order shifts and image ids (random if 0)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Flag subjects and aggregate study performance");
    fs::path analyzeLog, analyzeOut = "analysis.json";
    bool force = false, applyFlags = false, sensitivity = false;
    std::string exclude;
    std::uint64_t analyzeSeed = 1;
    analyze->add_option("--log", analyzeLog, "Event log directory")->required();
    analyze->add_option("--out", analyzeOut, "Analysis JSON");
    analyze->add_flag("--force", force, "Accept sessions created under different config hashes");
    analyze->add_option("--exclude", exclude, "Comma-separated subject ids confirmed for exclusion");
    analyze->add_flag("--apply-flags", applyFlags, "Exclude every flagged subject");
    analyze->add_flag("--sensitivity", sensitivity, "Add subject-subset sensitivity curves");
    analyze->add_option("--seed", analyzeSeed, "Sensitivity sampling seed");
    analyze->add_option("--alpha", alpha, "Overall significance level");
    analyze->add_option("--per-type-alpha", perTypeAlpha, "Per-type significance level");

    // figures
    auto* figuresCmd = app.add_subcommand("figures", "Render SVG figures from reports");
    fs::path figDifficulty, figAnalysis, figOut = "figures";
    figuresCmd->add_option("--difficulty", figDifficulty, "Difficulty report JSON");
    figuresCmd->add_option("--analysis", figAnalysis, "Analysis JSON from analyze");
    figuresCmd->add_option("--out", figOut, "Output directory");

    // run
    auto* run = app.add_subcommand("run", "Run gen -> validate -> train -> predict -> stats -> reduce");
    fs::path runConfig, runWork;
    std::string stopAfter;
    bool noResume = false, printConfig = false;
    run->add_option("--config", runConfig, "PipelineConfig JSON (defaults when omitted)");
    run->add_option("--work", runWork, "Override workDir");
    run->add_option("--stop-after", stopAfter, "Last stage to run")
        ->check(CLI::IsMember({"gen", "validate", "train", "predict", "stats", "reduce"}));
    run->add_flag("--no-resume", noResume, "Rerun every stage");
    run->add_flag("--print-config", printConfig, "Print the effective config and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            pipeline::PipelineConfig config;
            config.dataset.scale = gen::scaleFromString(scale);
            config.dataset.masterSeed = genSeed;
            config.dataset.deskCount = genCount;
            config.dataset.splitRatios = parseSplits(splits);
            config.writeImages = !noImages;
            auto manifest = gen::buildManifest(config.dataset);
            manifest.header.configHash = pipeline::configHash(config);
            gen::saveManifest(manifest, genOut);
            if (config.writeImages) {
                gen::writeImages(manifest, genOut, [](std::size_t done, std::size_t total) {
                    if (done % 5000 == 0 || done == total) std::cerr << "rendered " << done << "/" << total << "\n";
                });
            }
            std::cout << "wrote " << manifest.entries.size() << " entries to " << genOut.string() << "\n";
        } else if (validate->parsed()) {
            const auto manifest = gen::loadManifest(validateManifestPath);
            const auto summary = pipeline::validateManifest(manifest, datasetDirOf(validateManifestPath), validateImages);
            std::cout << pipeline::toJson(summary).dump(2) << "\n";
            if (summary.invalid > 0) throw ExitError(2, std::to_string(summary.invalid) + " entries fail the oracle");
        } else if (train->parsed()) {
            const auto manifest = gen::loadManifest(trainManifest);
            const auto spec = trainSpecFile.empty() ? pipeline::PipelineConfig::deskTrainSpec()
                                                    : metric::trainSpecFromJson(readJson(trainSpecFile));
            auto model = metric::trainModel(manifest, spec, trainSeed, imagesFor(manifest, datasetDirOf(trainManifest)),
                                            [](const metric::EpochLog& e) {
                                                std::cerr << "epoch " << e.epoch << " loss " << e.trainLoss << " val acc "
                                                          << e.validationAccuracy << (e.improved ? " *" : "") << "\n";
                                            });
            model.manifestHash = manifest.header.configHash;
            metric::saveModel(model, trainOut);
            std::cout << "best epoch " << model.log.bestEpoch << ", validation accuracy " << model.log.bestValidationAccuracy << "\n";
        } else if (predictCmd->parsed()) {
            const auto manifest = gen::loadManifest(predictManifest);
            const auto model = metric::loadModel(predictModel);
            if (!model.manifestHash.empty() && model.manifestHash != manifest.header.configHash) {
                std::cerr << "warning: model was trained on a manifest with a different config hash\n";
            }
            const auto records = metric::predict(model, manifest, gen::splitFromString(predictSplit),
                                                 imagesFor(manifest, datasetDirOf(predictManifest)));
            metric::writePredictions(records, predictOut);
            std::cout << "accuracy " << metric::buildDifficultyReport(records).accuracy << " over " << records.size() << " entries\n";
        } else if (statsCmd->parsed()) {
            std::ifstream in(statsRecords);
            if (!in) throw std::runtime_error("cannot read " + statsRecords.string());
            std::string first;
            std::getline(in, first);
            if (first.find("\"predictedPos\"") != std::string::npos) {
                const auto report = metric::buildDifficultyReport(metric::readPredictions(statsRecords), alpha, perTypeAlpha);
                writeJson(statsOut, metric::toJson(report));
                std::cout << "accuracy " << report.accuracy << ", MCC " << report.mcc << "\n";
            } else {
                in.seekg(0);
                stats::ReportOptions options;
                options.alphaOverall = alpha;
                options.alphaPerType = perTypeAlpha;
                const auto report = study::aggregatePerformance(study::readRecordsJsonl(in), {}, options);
                writeJson(statsOut, stats::toJson(report));
                std::cout << report.observationCount << " observations\n";
            }
        } else if (reduce->parsed()) {
            const auto rules = reduceRules.empty() ? reducer::ReductionRules{} : reducer::rulesFromJson(readJson(reduceRules));
            std::optional<metric::DifficultyReport> difficulty;
            if (!reduceReport.empty()) difficulty = metric::difficultyReportFromJson(readJson(reduceReport));
            const auto manifest = gen::loadManifest(reduceManifest);
            const auto reduction = reducer::reduceParameterSpace(rules, difficulty ? &difficulty->tables : nullptr);
            const auto set = reducer::selectTrialImages(reduction.cells, manifest, reduceSeed, rules.trialsPerCombination);
            auto j = reducer::toJson(set);
            nlohmann::json notes = nlohmann::json::array();
            for (const auto& x : reduction.justifications) {
                notes.push_back({{"parameter", x.parameter}, {"value", x.value}, {"note", x.note}});
                std::cout << "removed " << x.parameter << "=" << x.value << ": " << x.note << "\n";
            }
            j["justifications"] = notes;
            j["configHash"] = manifest.header.configHash;
            writeJson(reduceOut, j);
            std::cout << set.trials.size() << " evaluation trials over " << reduction.cells.size() << " cells\n";
        } else if (serve->parsed()) {
            const auto j = readJson(serveTrialSet);
            study::ServerOptions options;
            options.seed = serveSeed ? serveSeed : std::random_device{}();
            options.operatorToken = token.empty() ? randomToken() : token;
            options.logDir = serveLog;
            options.configHash = j.value("configHash", "");
            if (!serveImages.empty()) options.images = study::directoryPngs(serveImages);
            study::StudyServer server(reducer::trialSetFromJson(j), options);
            std::cout << "serving on http://" << host << ":" << port << " (log " << serveLog.string() << ")\n";
            if (token.empty()) std::cout << "operator token: " << options.operatorToken << "\n";
            std::cout.flush();
            server.listen(host, port);
        } else if (analyze->parsed()) {
            const auto hashes = study::sessionConfigHashes(analyzeLog);
            std::set<std::string> distinct;
            for (const auto& [id, h] : hashes) distinct.insert(h);
            if (distinct.size() > 1 && !force) {
                std::string list;
                for (const auto& h : distinct) list += " " + (h.empty() ? std::string("<none>") : h);
                throw ExitError(2, "sessions come from different config hashes:" + list + " (use --force to combine)");
            }
            const auto records = study::loadRecords(analyzeLog);
            std::set<std::string> excluded;
            for (const auto& id : splitList(exclude)) excluded.insert(id);
            nlohmann::json subjects = nlohmann::json::array();
            std::set<std::string> allSubjects;
            for (const auto& r : records) allSubjects.insert(r.subjectId);
            if (allSubjects.size() >= 3) {
                const auto flags = study::flagOutlierSubjects(records);
                subjects = study::toJson(flags);
                for (const auto& s : flags) {
                    if (!s.excluded) continue;
                    std::cout << "flagged " << s.subjectId << ": " << s.exclusionReason << (applyFlags ? " (excluded)" : " (advisory)") << "\n";
                    if (applyFlags) excluded.insert(s.subjectId);
                }
            } else {
                std::cerr << "warning: fewer than 3 subjects, outlier flagging skipped\n";
            }
            stats::ReportOptions options;
            options.alphaOverall = alpha;
            options.alphaPerType = perTypeAlpha;
            const auto report = study::aggregatePerformance(records, excluded, options);
            nlohmann::json out{{"configHash", distinct.size() == 1 ? *distinct.begin() : ""},
                               {"subjects", subjects},
                               {"excluded", excluded},
                               {"report", stats::toJson(report)},
                               {"hypotheses", stats::toJson(stats::evaluateHypotheses(report))}};
            if (distinct.size() > 1) out["configHashes"] = distinct;
            if (sensitivity) {
                const auto obs = study::observationsFrom(records, excluded);
                nlohmann::json curves = nlohmann::json::array();
                for (auto p : stats::kAllParameters) {
                    for (auto m : {stats::Measure::ER, stats::Measure::RT}) {
                        try {
                            curves.push_back(stats::toJson(stats::sensitivityAnalysis(obs, p, m, analyzeSeed)));
                        } catch (const std::invalid_argument& e) {
                            std::cerr << "warning: sensitivity " << stats::nameOf(p) << " " << stats::nameOf(m) << ": " << e.what() << "\n";
                        }
                    }
                }
                out["sensitivity"] = curves;
            }
            writeJson(analyzeOut, out);
            std::cout << report.observationCount << " evaluation records, " << report.ootCount << " out of time, "
                      << excluded.size() << " subjects excluded\n";
        } else if (figuresCmd->parsed()) {
            std::optional<stats::PerformanceReport> difficulty, performance;
            std::vector<stats::SensitivityCurve> curves;
            if (!figDifficulty.empty()) difficulty = metric::difficultyReportFromJson(readJson(figDifficulty)).tables;
            if (!figAnalysis.empty()) {
                const auto j = readJson(figAnalysis);
                performance = stats::reportFromJson(j.at("report"));
                for (const auto& c : j.value("sensitivity", nlohmann::json::array())) curves.push_back(stats::sensitivityFromJson(c));
            }
            if (!difficulty && !performance) throw CLI::ValidationError("figures", "give --difficulty and/or --analysis");
            const auto files = figures::writeFigureSet(figOut, difficulty ? &*difficulty : nullptr,
                                                       performance ? &*performance : nullptr, curves);
            for (const auto& f : files) std::cout << f.string() << "\n";
        } else if (run->parsed()) {
            auto config = runConfig.empty() ? pipeline::PipelineConfig{} : pipeline::loadPipelineConfig(pipeline::resolveDataPath(runConfig));
            if (!runWork.empty()) config.workDir = runWork;
            if (printConfig) {
                std::cout << pipeline::toJson(config).dump(2) << "\n";
                return 0;
            }
            pipeline::RunOptions options;
            if (!stopAfter.empty()) options.stopAfter = pipeline::stageFromString(stopAfter);
            options.resume = !noResume;
            options.progress = [](const std::string& m) { std::cerr << m << "\n"; };
            const auto result = pipeline::runPipeline(config, options);
            for (auto s : result.skipped) std::cout << "skipped " << pipeline::nameOf(s) << " (up to date)\n";
            for (auto s : result.ran) std::cout << "ran " << pipeline::nameOf(s) << "\n";
            std::cout << "config hash " << result.configHash << "\n";
        }
    } catch (const ExitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code();
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
