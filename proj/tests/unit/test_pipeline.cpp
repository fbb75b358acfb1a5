#include <filesystem>
#include <fstream>
#include <set>

#include "olab/pipeline/pipeline.hpp"
#include "test_support.hpp"

using namespace olab;
using namespace olab::pipeline;

namespace {

PipelineConfig smallConfig(const std::string& name) {
    PipelineConfig c;
    c.workDir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(c.workDir);
    c.dataset.deskCount = 1000;
    c.dataset.splitRatios = {0.2, 0.1, 0.7};
    c.writeImages = false;
    c.train.inputSize = 16;
    c.train.denseWidth = 16;
    c.train.maxEpochs = 1;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("pipeline config round-trips and hashes canonically") {
    PipelineConfig c;
    c.dataset.triples = {{OutlierType::Shape, 1, 2}};
    c.train.maxEpochs = 7;
    const auto back = pipelineConfigFromJson(toJson(c));
    CHECK(toJson(back) == toJson(c));
    CHECK(configHash(back) == configHash(c));
    auto moved = c;
    moved.workDir = "elsewhere";
    CHECK(configHash(moved) == configHash(c));
    auto reseeded = c;
    reseeded.trialSeed = 99;
    CHECK(configHash(reseeded) != configHash(c));

    CHECK_THROWS_AS(pipelineConfigFromJson({{"bogus", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(pipelineConfigFromJson({{"alphaOverall", 1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(pipelineConfigFromJson({{"train", {{"numClasses", 10}}}}), std::invalid_argument);
    CHECK_THROWS(pipelineConfigFromJson({{"predictSplit", "holdout"}}));
    CHECK(stageFromString("reduce") == Stage::Reduce);
    CHECK_THROWS_AS(stageFromString("deploy"), std::invalid_argument);
}

TEST_CASE("stop after gen leaves only the manifest and images") {
    auto c = smallConfig("olab_test_pipe_gen");
    c.dataset.deskCount = 64;
    c.writeImages = true;
    const auto r = runPipeline(c, {Stage::Gen, true, {}});
    CHECK(r.ran == std::vector<Stage>{Stage::Gen});
    const Layout layout{c.workDir};
    std::set<std::string> names;
    for (const auto& f : std::filesystem::directory_iterator(layout.dataset())) names.insert(f.path().filename().string());
    CHECK(names == std::set<std::string>{"images", "manifest.header.json", "manifest.jsonl"});
    std::size_t pngs = 0;
    for (const auto& f : std::filesystem::directory_iterator(layout.dataset() / "images")) pngs += f.path().extension() == ".png";
    CHECK(pngs == 64);
    CHECK_FALSE(std::filesystem::exists(layout.validation()));
    CHECK_FALSE(std::filesystem::exists(layout.model()));
    CHECK(gen::loadManifest(layout.dataset()).header.configHash == r.configHash);
}

TEST_CASE("full run is resumable and reproducible") {
    const auto c = smallConfig("olab_test_pipe_full");
    const Layout layout{c.workDir};
    const auto first = runPipeline(c);
    CHECK(first.ran.size() == 6);
    std::string hash;
    const auto trialSet = readStamped(layout.trialSet(), &hash);
    CHECK(hash == first.configHash);
    CHECK(trialSet.at("trials").size() == 44);
    CHECK(trialSet.at("justifications").size() == 5);
    const auto manifestText = slurp(gen::manifestFile(layout.dataset()));
    const auto trialText = slurp(layout.trialSet());

    const auto again = runPipeline(c);
    CHECK(again.ran.empty());
    CHECK(again.skipped.size() == 6);

    RunOptions fresh;
    fresh.resume = false;
    const auto rerun = runPipeline(c, fresh);
    CHECK(rerun.ran.size() == 6);
    CHECK(slurp(gen::manifestFile(layout.dataset())) == manifestText);
    CHECK(slurp(layout.trialSet()) == trialText);

    // A changed downstream setting reruns from the first stage whose stamp
    // no longer matches, which is every stage since the hash covers all.
    auto changed = c;
    changed.trialSeed = 5;
    const auto third = runPipeline(changed);
    CHECK(third.ran.size() == 6);
    CHECK(slurp(layout.trialSet()) != trialText);
}

TEST_CASE("stage failures name the stage and the artifacts present") {
    auto c = smallConfig("olab_test_pipe_fail");
    c.dataset.deskCount = 200;  // test split cannot cover the 44 cells
    c.dataset.splitRatios = {0.4, 0.3, 0.3};
    try {
        runPipeline(c);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == Stage::Reduce);
        const std::string what = e.what();
        CHECK(what.find("stage reduce failed") != std::string::npos);
        CHECK(what.find("does not cover cell") != std::string::npos);
        CHECK(e.artifacts() == std::vector<std::string>{"manifest", "validation", "model", "predictions", "difficulty"});
    }
}

TEST_CASE("validation re-derives ground truth from images") {
    auto c = smallConfig("olab_test_pipe_validate");
    c.dataset.deskCount = 94;
    c.writeImages = true;
    runPipeline(c, {Stage::Gen, true, {}});
    const Layout layout{c.workDir};
    auto manifest = gen::loadManifest(layout.dataset());
    const auto ok = validateManifest(manifest, layout.dataset(), true);
    CHECK(ok.checked == 94);
    CHECK(ok.invalid == 0);
    // Point one entry at another image: the oracle must notice.
    manifest.entries[0].imagePath = manifest.entries[1].imagePath;
    const auto bad = validateManifest(manifest, layout.dataset(), true);
    CHECK(bad.invalid == 1);
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations.front().rfind(manifest.entries[0].id, 0) == 0);
}
