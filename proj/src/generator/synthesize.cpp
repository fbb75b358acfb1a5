#include "olab/generator/synthesize.hpp"

#include <algorithm>
#include <vector>

#include "olab/core/random.hpp"

namespace olab::gen {

namespace {

// `count` indices drawn without replacement from [0, universe) \ {excluded}.
std::vector<int> pickOthers(int universe, int excluded, int count, Engine& rng) {
    std::vector<int> pool;
    for (int i = 0; i < universe; ++i) {
        if (i != excluded) pool.push_back(i);
    }
    shuffleInPlace(pool, rng);
    pool.resize(static_cast<std::size_t>(count));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

Grid synthesizeGrid(const GridConfig& config, std::uint64_t seed) {
    checkConfig(config);
    Engine rng(seed);

    const int oc = config.outlierColor.index();
    const int os = config.outlierShape.index();
    const auto otherColors = pickOthers(kNumColors, oc, config.nColors - 1, rng);
    const auto otherShapes = pickOthers(kNumShapes, os, config.nShapes - 1, rng);

    std::vector<int> withColor = otherColors;
    withColor.push_back(oc);
    std::vector<int> withShape = otherShapes;
    withShape.push_back(os);

    // Distractor colors/shapes per type; conjunction uses the full product
    // minus the outlier pair.
    const bool colorUnique =
        config.type == OutlierType::Color || config.type == OutlierType::Redundant;
    const bool shapeUnique =
        config.type == OutlierType::Shape || config.type == OutlierType::Redundant;
    const auto& colors = colorUnique ? otherColors : withColor;
    const auto& shapes = shapeUnique ? otherShapes : withShape;

    std::vector<Stimulus> distractors;
    for (int c : colors) {
        for (int s : shapes) {
            if (c == oc && s == os) continue;
            distractors.push_back({ColorId(c), ShapeId(s)});
        }
    }
    const int kinds = static_cast<int>(distractors.size());
    if (kinds == 0 || 2 * kinds > kGridCells - 1) {
        throw DomainError("configuration cannot fit the grid: " + describe(config));
    }

    shuffleInPlace(distractors, rng);
    std::vector<Stimulus> fill;
    fill.reserve(kGridCells - 1);
    for (const auto& d : distractors) {
        fill.push_back(d);
        fill.push_back(d);
    }
    for (std::size_t i = 0; fill.size() < static_cast<std::size_t>(kGridCells - 1); ++i) {
        fill.push_back(distractors[i % distractors.size()]);
    }
    shuffleInPlace(fill, rng);

    Grid grid;
    grid.config = config;
    grid.seed = seed;
    std::size_t next = 0;
    for (int pos = 0; pos < kGridCells; ++pos) {
        if (pos == config.outlierPos) {
            grid.cells[static_cast<std::size_t>(pos)] = {config.outlierColor, config.outlierShape};
        } else {
            grid.cells[static_cast<std::size_t>(pos)] = fill[next++];
        }
    }
    return grid;
}

}  // namespace olab::gen
