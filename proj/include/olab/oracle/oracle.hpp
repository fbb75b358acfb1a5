#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "olab/core/model.hpp"

namespace olab::gen {
class Image;
}

namespace olab::oracle {

using Cells = std::span<const Stimulus, kGridCells>;

class OutlierError : public std::runtime_error {
public:
    OutlierError(const std::string& what, std::vector<int> positions)
        : std::runtime_error(what), positions_(std::move(positions)) {}
    const std::vector<int>& positions() const { return positions_; }

private:
    std::vector<int> positions_;
};

/// No stimulus occurs exactly once. positions() is empty.
class NoOutlier : public OutlierError {
public:
    NoOutlier() : OutlierError("no outlier: every stimulus occurs at least twice", {}) {}
};

/// More than one stimulus occurs exactly once; positions() lists them.
class MultipleOutliers : public OutlierError {
public:
    explicit MultipleOutliers(std::vector<int> positions);
};

int findOutlier(Cells cells);
OutlierType classifyType(Cells cells);
int countDiffStimuli(Cells cells);

struct OracleReport {
    int outlierPos = -1;
    OutlierType type = OutlierType::Color;
    int diffStimuli = 0;
    bool valid = false;
    std::vector<std::string> violations;
};

/// Collects every violated grid invariant against the expected config.
/// Violation strings start with a stable tag: "outlier", "position", "type",
/// "multiplicity", "distinct", "colors", "shapes", "diffStimuli".
OracleReport validateGrid(Cells cells, const GridConfig& config);
inline OracleReport validateGrid(const Grid& grid, const GridConfig& config) {
    return validateGrid(Cells(grid.cells), config);
}

/// Recovers the 64 stimuli from a 256x256 raster: nearest palette color of
/// the painted pixels, shape from the painted-mask silhouette.
std::array<Stimulus, kGridCells> decodeRaster(const gen::Image& image);

}  // namespace olab::oracle
