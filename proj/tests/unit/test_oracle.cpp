#include "test_support.hpp"

#include <set>

#include "olab/core/random.hpp"
#include "olab/generator/synthesize.hpp"
#include "olab/oracle/oracle.hpp"

using namespace olab;

namespace {

std::array<Stimulus, kGridCells> uniform(Stimulus s) {
    std::array<Stimulus, kGridCells> cells{};
    cells.fill(s);
    return cells;
}

const Stimulus kRedCircle{ColorId(1), ShapeId(ShapeKind::Circle)};
const Stimulus kBlueCircle{ColorId(2), ShapeId(ShapeKind::Circle)};

}  // namespace

TEST_CASE("findOutlier") {
    auto cells = uniform(kRedCircle);
    cells[10] = kBlueCircle;
    CHECK(oracle::findOutlier(cells) == 10);

    CHECK_THROWS_AS(oracle::findOutlier(uniform(kRedCircle)), oracle::NoOutlier);

    cells[20] = {ColorId(3), ShapeId(ShapeKind::Square)};
    try {
        oracle::findOutlier(cells);
        FAIL("expected MultipleOutliers");
    } catch (const oracle::MultipleOutliers& ex) {
        CHECK(ex.positions() == std::vector<int>{10, 20});
    }
}

TEST_CASE("classifyType branches") {
    auto cells = uniform(kRedCircle);
    cells[10] = kBlueCircle;  // shares shape, color unique
    CHECK(oracle::classifyType(cells) == OutlierType::Color);

    cells[10] = {ColorId(1), ShapeId(ShapeKind::Square)};  // shares color
    CHECK(oracle::classifyType(cells) == OutlierType::Shape);

    cells[10] = {ColorId(4), ShapeId(ShapeKind::Diamond)};
    CHECK(oracle::classifyType(cells) == OutlierType::Redundant);

    // Conjunction: distractors (red,square) and (blue,circle); outlier (red,circle).
    for (int i = 0; i < 64; ++i) cells[static_cast<std::size_t>(i)] = i % 2 ? Stimulus{ColorId(1), ShapeId(ShapeKind::Square)} : kBlueCircle;
    cells[7] = kRedCircle;
    CHECK(oracle::classifyType(cells) == OutlierType::Conjunction);

    CHECK_THROWS_AS(oracle::classifyType(uniform(kRedCircle)), oracle::NoOutlier);
}

TEST_CASE("countDiffStimuli") {
    auto cells = uniform(kRedCircle);
    cells[3] = kBlueCircle;
    CHECK(oracle::countDiffStimuli(cells) == 1);

    GridConfig cfg{OutlierType::Color, 4, 2, ColorId(0), ShapeId(0), 12};
    CHECK(oracle::countDiffStimuli(gen::synthesizeGrid(cfg, 8).cells) == 6);
}

TEST_CASE("validateGrid reports violations") {
    GridConfig cfg{OutlierType::Color, 3, 2, ColorId(0), ShapeId(1), 5};
    auto grid = gen::synthesizeGrid(cfg, 4);
    CHECK(oracle::validateGrid(grid, cfg).valid);

    // Hand-built: a distractor stimulus appearing only once next to the outlier
    // makes it a second unique stimulus; use a duplicate-free pair instead.
    auto cells = uniform(kRedCircle);
    cells[0] = kBlueCircle;
    cells[1] = {ColorId(1), ShapeId(ShapeKind::Square)};
    auto report = oracle::validateGrid(cells, GridConfig{OutlierType::Color, 2, 1, ColorId(2), ShapeId(1), 0});
    CHECK_FALSE(report.valid);
    bool multiplicity = false, outlier = false;
    for (const auto& v : report.violations) {
        multiplicity |= v.rfind("multiplicity", 0) == 0;
        outlier |= v.rfind("outlier", 0) == 0;
    }
    CHECK(multiplicity);
    CHECK(outlier);
}

TEST_CASE("mutating one cell of a valid grid invalidates it") {
    static const auto triples = feasibleTriples();
    Engine rng(404);
    int flipped = 0;
    for (int iter = 0; iter < 100; ++iter) {
        const auto& t = triples[uniformBelow(rng, triples.size())];
        GridConfig cfg{t.type, t.nColors, t.nShapes, ColorId(static_cast<int>(uniformBelow(rng, 7))),
                       ShapeId(static_cast<int>(uniformBelow(rng, 5))), static_cast<int>(uniformBelow(rng, 64))};
        auto grid = gen::synthesizeGrid(cfg, rng());
        REQUIRE(oracle::validateGrid(grid, cfg).valid);
        // Recolor one distractor into a stimulus the grid does not contain yet.
        std::set<Stimulus> present(grid.cells.begin(), grid.cells.end());
        bool mutated = false;
        for (int k = 0; k < 64 && !mutated; ++k) {
            const int pos = (static_cast<int>(uniformBelow(rng, 64)) + k) % 64;
            if (pos == cfg.outlierPos) continue;
            auto& cell = grid.cells[static_cast<std::size_t>(pos)];
            for (int dc = 1; dc < 7 && !mutated; ++dc) {
                const Stimulus candidate{ColorId((cell.color.index() + dc) % 7), cell.shape};
                if (present.count(candidate) == 0) {
                    cell = candidate;
                    mutated = true;
                }
            }
            // All seven colors already pair with this shape: change the shape instead.
            for (int ds = 1; ds < 5 && !mutated; ++ds) {
                const Stimulus candidate{cell.color, ShapeId((cell.shape.index() + ds) % 5)};
                if (present.count(candidate) == 0) {
                    cell = candidate;
                    mutated = true;
                }
            }
        }
        REQUIRE(mutated);
        const auto report = oracle::validateGrid(grid, cfg);
        CHECK_FALSE(report.valid);
        flipped += !report.valid;
    }
    CHECK(flipped == 100);
}
