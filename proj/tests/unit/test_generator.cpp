#include "test_support.hpp"

#include <filesystem>
#include <map>
#include <set>

#include "olab/core/random.hpp"
#include "olab/generator/dataset.hpp"
#include "olab/generator/render.hpp"
#include "olab/generator/synthesize.hpp"
#include "olab/oracle/oracle.hpp"

using namespace olab;
namespace fs = std::filesystem;

namespace {

GridConfig randomFeasibleConfig(Engine& rng) {
    static const auto triples = feasibleTriples();
    const auto& t = triples[uniformBelow(rng, triples.size())];
    return {t.type,
            t.nColors,
            t.nShapes,
            ColorId(static_cast<int>(uniformBelow(rng, 7))),
            ShapeId(static_cast<int>(uniformBelow(rng, 5))),
            static_cast<int>(uniformBelow(rng, 64))};
}

fs::path scratchDir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("olab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("synthesizeGrid rejects the infeasible conjunction point") {
    GridConfig cfg{OutlierType::Conjunction, 7, 5, ColorId(0), ShapeId(0), 0};
    CHECK_THROWS_AS(gen::synthesizeGrid(cfg, 1), DomainError);
}

TEST_CASE("synthesizeGrid color type with a single distractor stimulus") {
    GridConfig cfg{OutlierType::Color, 2, 1, ColorId(1), ShapeId(ShapeKind::Triangle), 0};
    const auto grid = gen::synthesizeGrid(cfg, 99);
    CHECK(grid.cells[0] == Stimulus{ColorId(1), ShapeId(ShapeKind::Triangle)});
    const auto distractor = grid.cells[1];
    CHECK(distractor.color != ColorId(1));
    CHECK(distractor.shape == ShapeId(ShapeKind::Triangle));
    for (int i = 1; i < 64; ++i) CHECK(grid.cells[static_cast<std::size_t>(i)] == distractor);
}

TEST_CASE("synthesizeGrid type semantics") {
    Engine rng(2024);
    for (int iter = 0; iter < 400; ++iter) {
        const auto cfg = randomFeasibleConfig(rng);
        const auto grid = gen::synthesizeGrid(cfg, rng());
        const Stimulus out{cfg.outlierColor, cfg.outlierShape};
        REQUIRE(grid.cells[static_cast<std::size_t>(cfg.outlierPos)] == out);
        bool sharesColor = false, sharesShape = false, sharesPair = false;
        for (int i = 0; i < 64; ++i) {
            if (i == cfg.outlierPos) continue;
            const auto& s = grid.cells[static_cast<std::size_t>(i)];
            sharesColor |= s.color == out.color;
            sharesShape |= s.shape == out.shape;
            sharesPair |= s == out;
        }
        CHECK_FALSE(sharesPair);
        switch (cfg.type) {
            case OutlierType::Color: CHECK(!sharesColor); CHECK(sharesShape); break;
            case OutlierType::Shape: CHECK(!sharesShape); CHECK(sharesColor); break;
            case OutlierType::Redundant: CHECK(!sharesColor); CHECK(!sharesShape); break;
            case OutlierType::Conjunction: CHECK(sharesColor); CHECK(sharesShape); break;
        }
    }
}

TEST_CASE("synthesizeGrid is deterministic and seed-sensitive") {
    GridConfig cfg{OutlierType::Conjunction, 5, 4, ColorId(3), ShapeId(1), 17};
    const auto a = gen::synthesizeGrid(cfg, 5);
    const auto b = gen::synthesizeGrid(cfg, 5);
    const auto c = gen::synthesizeGrid(cfg, 6);
    CHECK(a.cells == b.cells);
    CHECK(a.cells != c.cells);
}

TEST_CASE("oracle round trip over 1000 seeded grids") {
    Engine rng(77);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto cfg = randomFeasibleConfig(rng);
        const auto grid = gen::synthesizeGrid(cfg, rng());
        CHECK(oracle::findOutlier(grid.cells) == cfg.outlierPos);
        CHECK(oracle::classifyType(grid.cells) == cfg.type);
        CHECK(oracle::countDiffStimuli(grid.cells) == diffStimuliClosedForm(cfg.type, cfg.nColors, cfg.nShapes));
        const auto report = oracle::validateGrid(grid, cfg);
        CHECK_MESSAGE(report.valid, describe(cfg));
    }
}

TEST_CASE("multiset occupancy: 63 distractors, each kind at least twice") {
    Engine rng(5);
    for (int iter = 0; iter < 300; ++iter) {
        const auto cfg = randomFeasibleConfig(rng);
        const auto grid = gen::synthesizeGrid(cfg, rng());
        std::map<int, int> counts;
        for (int i = 0; i < 64; ++i) {
            if (i != cfg.outlierPos) ++counts[stimulusKey(grid.cells[static_cast<std::size_t>(i)])];
        }
        int total = 0;
        for (const auto& [k, n] : counts) {
            CHECK(n >= 2);
            total += n;
        }
        CHECK(total == 63);
        // Round-robin fill keeps counts within one of each other.
        int lo = 64, hi = 0;
        for (const auto& [k, n] : counts) {
            lo = std::min(lo, n);
            hi = std::max(hi, n);
        }
        CHECK(hi - lo <= 1);
    }
}

TEST_CASE("renderGrid geometry") {
    GridConfig cfg{OutlierType::Shape, 1, 2, ColorId(2), ShapeId(ShapeKind::Square), 9};
    const auto grid = gen::synthesizeGrid(cfg, 3);
    const auto img = gen::renderGrid(grid);
    CHECK(img.width() == 256);
    CHECK(img.height() == 256);

    // Outlier square at row 1, col 1: a 26x26 block at (35,35).
    const Rgb ink = ColorId(2).rgb();
    const Rgb white{255, 255, 255};
    int painted = 0;
    for (int y = 32; y < 64; ++y) {
        for (int x = 32; x < 64; ++x) {
            const bool inside = x >= 35 && x < 61 && y >= 35 && y < 61;
            if (inside) CHECK(img.at(x, y) == ink);
            else CHECK(img.at(x, y) == white);
            painted += img.at(x, y) == ink;
        }
    }
    CHECK(painted == 26 * 26);

    // Every cell carries some ink and nothing touches the padding band.
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            int ink_px = 0;
            for (int y = 0; y < 32; ++y) {
                for (int x = 0; x < 32; ++x) {
                    const bool pad = x < 3 || x >= 29 || y < 3 || y >= 29;
                    const bool isInk = img.at(c * 32 + x, r * 32 + y) != white;
                    if (pad) CHECK_FALSE(isInk);
                    ink_px += isInk;
                }
            }
            CHECK(ink_px > 200);
        }
    }
    CHECK(gen::renderGrid(grid) == img);
}

TEST_CASE("shape silhouettes have the expected areas") {
    auto area = [](ShapeKind k) {
        int n = 0;
        for (int y = 0; y < 26; ++y)
            for (int x = 0; x < 26; ++x) n += gen::shapeCovers(k, x, y, 26);
        return n;
    };
    CHECK(area(ShapeKind::Square) == 676);
    CHECK(area(ShapeKind::Triangle) == 338);
    CHECK(area(ShapeKind::Circle) == 540);
    CHECK(area(ShapeKind::Clover) == 436);
    CHECK(area(ShapeKind::Diamond) == 364);
}

TEST_CASE("PNG encode/decode is lossless and raster decoding recovers the grid") {
    Engine rng(11);
    for (int iter = 0; iter < 30; ++iter) {
        const auto cfg = randomFeasibleConfig(rng);
        const auto grid = gen::synthesizeGrid(cfg, rng());
        const auto img = gen::renderGrid(grid);
        const auto png = gen::encodePng(img);
        const auto back = gen::decodePng(png);
        CHECK(back == img);
        CHECK(oracle::decodeRaster(back) == grid.cells);
    }
    std::vector<std::uint8_t> junk{1, 2, 3};
    CHECK_THROWS(gen::decodePng(junk));
}

TEST_CASE("full-scale manifest") {
    gen::DatasetOptions opt;
    opt.scale = gen::Scale::Full;
    const auto m = gen::buildManifest(opt);
    CHECK(m.entries.size() == 210560);
    std::set<std::string> ids;
    std::map<gen::Split, int> splits;
    for (const auto& e : m.entries) {
        ids.insert(e.id);
        ++splits[e.split];
    }
    CHECK(ids.size() == m.entries.size());
    // 2240 entries per triple, split 1792/224/224.
    CHECK(splits[gen::Split::Train] == 94 * 1792);
    CHECK(splits[gen::Split::Validation] == 94 * 224);
    CHECK(splits[gen::Split::Test] == 94 * 224);
}

TEST_CASE("split ratios") {
    gen::DatasetOptions opt;
    opt.deskCount = 940;
    opt.splitRatios = {1.0, 0.0, 0.0};
    for (const auto& e : gen::buildManifest(opt).entries) CHECK(e.split == gen::Split::Train);
    opt.splitRatios = {0.5, 0.2, 0.2};
    CHECK_THROWS_AS(gen::buildManifest(opt), std::invalid_argument);
}

TEST_CASE("desk-scale manifest is stratified and balanced") {
    gen::DatasetOptions opt;
    opt.deskCount = 6400;
    opt.masterSeed = 42;
    const auto m = gen::buildManifest(opt);
    CHECK(m.entries.size() == 6400);
    std::map<TypeTriple, std::vector<const gen::ManifestEntry*>> byTriple;
    for (const auto& e : m.entries) byTriple[{e.config.type, e.config.nColors, e.config.nShapes}].push_back(&e);
    CHECK(byTriple.size() == 94);
    for (const auto& [t, group] : byTriple) {
        CHECK((group.size() == 68 || group.size() == 69));
        std::array<int, 64> pos{};
        std::map<gen::Split, int> split;
        for (const auto* e : group) {
            ++pos[static_cast<std::size_t>(e->config.outlierPos)];
            ++split[e->split];
        }
        const auto [lo, hi] = std::minmax_element(pos.begin(), pos.end());
        CHECK(*hi - *lo <= 1);
        CHECK(split[gen::Split::Validation] == 7);
        CHECK(split[gen::Split::Test] == 7);
    }
    const auto again = gen::buildManifest(opt);
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        CHECK(gen::entryToJson(m.entries[i]) == gen::entryToJson(again.entries[i]));
    }
}

TEST_CASE("manifest save/load and image writing") {
    const auto dir = scratchDir("manifest");
    gen::DatasetOptions opt;
    opt.deskCount = 20;
    opt.triples = {{OutlierType::Redundant, 2, 2}, {OutlierType::Shape, 1, 2}};
    auto m = gen::buildManifest(opt);
    gen::saveManifest(m, dir);
    gen::writeImages(m, dir);
    const auto loaded = gen::loadManifest(dir);
    REQUIRE(loaded.entries.size() == 20);
    CHECK(loaded.header.masterSeed == opt.masterSeed);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(gen::entryToJson(loaded.entries[i]) == gen::entryToJson(m.entries[i]));
        const auto img = gen::readPng(dir / loaded.entries[i].imagePath);
        CHECK(oracle::findOutlier(oracle::decodeRaster(img)) == loaded.entries[i].groundTruth());
    }
    fs::remove_all(dir);
}
