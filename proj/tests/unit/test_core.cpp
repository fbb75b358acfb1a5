#include "test_support.hpp"

#include <map>
#include <set>

#include "olab/core/json_io.hpp"
#include "olab/core/model.hpp"
#include "olab/core/random.hpp"

using namespace olab;

TEST_CASE("palette and shape vocabulary are fixed") {
    const std::vector<std::string> expected = {"#1B9E77", "#D95F02", "#7570B3", "#E7298A",
                                               "#66A61E", "#E6AB02", "#A6761D"};
    for (int i = 0; i < kNumColors; ++i) CHECK(ColorId(i).hex() == expected[static_cast<std::size_t>(i)]);
    CHECK(ColorId(0).rgb() == Rgb{0x1B, 0x9E, 0x77});
    CHECK(ColorId(6).rgb() == Rgb{0xA6, 0x76, 0x1D});
    CHECK(ShapeId(0).name() == "triangle");
    CHECK(ShapeId(3).name() == "clover");
    CHECK(ShapeId(4).name() == "diamond");
    CHECK_THROWS_AS(ColorId(7), RangeError);
    CHECK_THROWS_AS(ShapeId(-1), RangeError);
}

TEST_CASE("isFeasible examples") {
    CHECK_FALSE(isFeasible(OutlierType::Conjunction, 7, 5));
    CHECK_FALSE(isFeasible(OutlierType::Color, 1, 3));
    CHECK(isFeasible(OutlierType::Shape, 1, 2));
    CHECK(isFeasible(OutlierType::Redundant, 2, 2));
    CHECK_FALSE(isFeasible(OutlierType::Color, 7, 5));
    CHECK_FALSE(isFeasible(OutlierType::Redundant, 1, 2));
    CHECK_FALSE(isFeasible(OutlierType::Redundant, 2, 1));
    CHECK_FALSE(isFeasible(OutlierType::Shape, 7, 4));
    CHECK_FALSE(isFeasible(OutlierType::Color, 6, 5));
    CHECK(isFeasible(OutlierType::Color, 2, 1));
    CHECK_THROWS_AS(isFeasible(OutlierType::Color, 0, 3), RangeError);
    CHECK_THROWS_AS(isFeasible(OutlierType::Color, 8, 3), RangeError);
    CHECK_THROWS_AS(isFeasible(OutlierType::Color, 3, 6), RangeError);
}

namespace {

// Brute-force reading of the generation constraints, written without
// reference to isFeasible.
int bruteForceTripleCount(OutlierType type) {
    int n = 0;
    for (int c = 1; c <= 7; ++c) {
        for (int s = 1; s <= 5; ++s) {
            if (c == 1 && s == 1) continue;
            if ((type == OutlierType::Color || type == OutlierType::Redundant) && c == 1) continue;
            if ((type == OutlierType::Shape || type == OutlierType::Redundant) && s == 1) continue;
            if (type == OutlierType::Conjunction && (c == 1 || s == 1)) continue;
            if ((c == 7 && s == 4) || (c == 6 && s == 5) || (c == 7 && s == 5)) continue;
            ++n;
        }
    }
    return n;
}

}  // namespace

TEST_CASE("feasible triple counts") {
    const auto triples = feasibleTriples();
    CHECK(triples.size() == 94);
    std::map<OutlierType, int> perType;
    for (const auto& t : triples) ++perType[t.type];
    for (auto t : kAllTypes) CHECK(perType[t] == bruteForceTripleCount(t));
    CHECK(perType[OutlierType::Color] == 27);
    CHECK(perType[OutlierType::Shape] == 25);
    CHECK(perType[OutlierType::Redundant] == 21);
    CHECK(perType[OutlierType::Conjunction] == 21);
}

TEST_CASE("enumerateCombinations") {
    const auto combos = enumerateCombinations();
    CHECK(combos.size() == 3290);
    int redundant = 0;
    for (const auto& c : combos) {
        CHECK(isFeasible(c.type, c.nColors, c.nShapes));
        redundant += c.type == OutlierType::Redundant;
    }
    CHECK(redundant == 21 * 35);
    // Canonical order: first entries walk the outlier shape, then color.
    CHECK(combos[0].type == OutlierType::Color);
    CHECK(combos[0].nColors == 2);
    CHECK(combos[0].nShapes == 1);
    CHECK(combos[1].outlierShape.index() == 1);
    CHECK(combos[5].outlierColor.index() == 1);
    CHECK(combos == enumerateCombinations());
}

TEST_CASE("expandWithPositions") {
    const auto configs = expandWithPositions(enumerateCombinations());
    CHECK(configs.size() == 210560);
    std::array<int, 64> perPos{};
    std::map<std::pair<int, int>, int> perPair;
    for (const auto& c : configs) {
        ++perPos[static_cast<std::size_t>(c.outlierPos)];
        ++perPair[{c.outlierColor.index(), c.outlierShape.index()}];
    }
    for (int n : perPos) CHECK(n == 3290);
    CHECK(perPair.size() == 35);
    for (const auto& [pair, n] : perPair) CHECK(n == 6016);
}

TEST_CASE("diffStimuliClosedForm") {
    CHECK(diffStimuliClosedForm(OutlierType::Color, 4, 2) == 6);
    CHECK(diffStimuliClosedForm(OutlierType::Redundant, 2, 2) == 1);
    // (6,5) is outside the design, so its c*s-1 = 29 is never produced.
    CHECK_THROWS_AS(diffStimuliClosedForm(OutlierType::Conjunction, 6, 5), DomainError);
    CHECK(diffStimuliClosedForm(OutlierType::Conjunction, 6, 4) == 23);
    CHECK(diffStimuliClosedForm(OutlierType::Shape, 3, 4) == 9);
    CHECK_THROWS_AS(diffStimuliClosedForm(OutlierType::Conjunction, 7, 5), DomainError);
}

TEST_CASE("design-space bounds hold for every feasible triple") {
    for (const auto& t : feasibleTriples()) {
        const int d = diffStimuliClosedForm(t.type, t.nColors, t.nShapes);
        CHECK(d >= 1);
        CHECK(d <= kMaxDistinctDistractors);
        CHECK(2 * d <= 63);
        if (t.type == OutlierType::Conjunction) CHECK(2 * (t.nColors * t.nShapes - 1) <= 63);
    }
    // The excluded conjunction point cannot fit: 34 distractors twice plus the outlier.
    CHECK(2 * (7 * 5 - 1) == 68);
    CHECK(1 + 2 * (7 * 5 - 1) == 69);
    CHECK(68 > 63);
}

TEST_CASE("checkConfig rejects bad positions and infeasible points") {
    GridConfig cfg{OutlierType::Color, 3, 2, ColorId(1), ShapeId(2), 64};
    CHECK_THROWS_AS(checkConfig(cfg), RangeError);
    cfg.outlierPos = 10;
    CHECK_NOTHROW(checkConfig(cfg));
    cfg.nColors = 1;
    CHECK_THROWS_AS(checkConfig(cfg), DomainError);
}

TEST_CASE("json round trip of a config and vocabulary export") {
    GridConfig cfg{OutlierType::Conjunction, 5, 3, ColorId(4), ShapeId(3), 42};
    nlohmann::json j = cfg;
    CHECK(j.at("type") == "conjunction");
    CHECK(j.get<GridConfig>() == cfg);
    const auto vocab = vocabularyJson();
    CHECK(vocab.at("version") == kPaletteVersion);
    CHECK(vocab.at("colors").size() == 7);
    CHECK(vocab.at("colors")[2].at("hex") == "#7570B3");
    CHECK(vocab.at("shapes")[1].at("name") == "circle");
}

TEST_CASE("seeded helpers are reproducible") {
    Engine a(deriveSeed(7, "x")), b(deriveSeed(7, "x"));
    for (int i = 0; i < 100; ++i) CHECK(uniformBelow(a, 13) == uniformBelow(b, 13));
    CHECK(deriveSeed(7, "x") != deriveSeed(7, "y"));
    Engine r(3);
    std::array<int, 6> counts{};
    for (int i = 0; i < 60000; ++i) ++counts[uniformBelow(r, 6)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}
