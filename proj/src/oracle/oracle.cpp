#include "olab/oracle/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "olab/generator/render.hpp"

namespace olab::oracle {

namespace {

std::string joinPositions(const std::vector<int>& positions) {
    std::ostringstream os;
    for (std::size_t i = 0; i < positions.size(); ++i) os << (i ? "," : "") << positions[i];
    return os.str();
}

std::map<Stimulus, int> histogram(Cells cells) {
    std::map<Stimulus, int> counts;
    for (const auto& s : cells) ++counts[s];
    return counts;
}

}  // namespace

MultipleOutliers::MultipleOutliers(std::vector<int> positions)
    : OutlierError("multiple outliers at positions " + joinPositions(positions), positions) {}

int findOutlier(Cells cells) {
    const auto counts = histogram(cells);
    std::vector<int> singles;
    for (int pos = 0; pos < kGridCells; ++pos) {
        if (counts.at(cells[static_cast<std::size_t>(pos)]) == 1) singles.push_back(pos);
    }
    if (singles.empty()) throw NoOutlier();
    if (singles.size() > 1) throw MultipleOutliers(std::move(singles));
    return singles.front();
}

OutlierType classifyType(Cells cells) {
    const int pos = findOutlier(cells);
    const Stimulus outlier = cells[static_cast<std::size_t>(pos)];
    bool colorShared = false;
    bool shapeShared = false;
    for (int i = 0; i < kGridCells; ++i) {
        if (i == pos) continue;
        colorShared |= cells[static_cast<std::size_t>(i)].color == outlier.color;
        shapeShared |= cells[static_cast<std::size_t>(i)].shape == outlier.shape;
    }
    if (!colorShared && !shapeShared) return OutlierType::Redundant;
    if (!colorShared) return OutlierType::Color;
    if (!shapeShared) return OutlierType::Shape;
    return OutlierType::Conjunction;
}

int countDiffStimuli(Cells cells) {
    const int pos = findOutlier(cells);
    std::set<Stimulus> distinct;
    for (int i = 0; i < kGridCells; ++i) {
        if (i != pos) distinct.insert(cells[static_cast<std::size_t>(i)]);
    }
    return static_cast<int>(distinct.size());
}

OracleReport validateGrid(Cells cells, const GridConfig& config) {
    OracleReport report;
    auto violate = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    try {
        report.outlierPos = findOutlier(cells);
        report.type = classifyType(cells);
        report.diffStimuli = countDiffStimuli(cells);
        if (report.outlierPos != config.outlierPos) {
            violate("position: outlier at " + std::to_string(report.outlierPos) + ", expected " +
                    std::to_string(config.outlierPos));
        }
        if (report.type != config.type) {
            violate("type: found " + std::string(nameOf(report.type)) + ", expected " +
                    std::string(nameOf(config.type)));
        }
        const auto& found = cells[static_cast<std::size_t>(report.outlierPos)];
        if (found.color != config.outlierColor || found.shape != config.outlierShape) {
            violate("outlier: stimulus differs from the configured outlier color/shape");
        }
    } catch (const OutlierError& ex) {
        violate(std::string("outlier: ") + ex.what());
    }

    const auto counts = histogram(cells);
    int distractorKinds = 0;
    for (const auto& [stim, n] : counts) {
        const bool isOutlier = report.outlierPos >= 0 && stim == cells[static_cast<std::size_t>(report.outlierPos)];
        if (isOutlier) continue;
        ++distractorKinds;
        if (n < 2) {
            violate("multiplicity: stimulus (" + std::string(stim.color.hex()) + ", " +
                    std::string(stim.shape.name()) + ") occurs " + std::to_string(n) + " time(s)");
        }
    }
    if (distractorKinds > kMaxDistinctDistractors) {
        violate("distinct: " + std::to_string(distractorKinds) + " distinct distractors > 31");
    }

    std::set<ColorId> colors;
    std::set<ShapeId> shapes;
    for (const auto& s : cells) {
        colors.insert(s.color);
        shapes.insert(s.shape);
    }
    if (static_cast<int>(colors.size()) != config.nColors) {
        violate("colors: " + std::to_string(colors.size()) + " distinct colors, expected " +
                std::to_string(config.nColors));
    }
    if (static_cast<int>(shapes.size()) != config.nShapes) {
        violate("shapes: " + std::to_string(shapes.size()) + " distinct shapes, expected " +
                std::to_string(config.nShapes));
    }
    if (report.outlierPos >= 0 && isFeasible(config.type, config.nColors, config.nShapes)) {
        const int expected = diffStimuliClosedForm(config.type, config.nColors, config.nShapes);
        if (report.diffStimuli != expected) {
            violate("diffStimuli: " + std::to_string(report.diffStimuli) + ", closed form gives " +
                    std::to_string(expected));
        }
    }

    report.valid = report.violations.empty();
    return report;
}

namespace {

int nearestPaletteColor(Rgb c) {
    int best = 0;
    long bestDist = -1;
    for (int i = 0; i < kNumColors; ++i) {
        const Rgb p = ColorId(i).rgb();
        const long dr = c.r - p.r, dg = c.g - p.g, db = c.b - p.b;
        const long d = dr * dr + dg * dg + db * db;
        if (bestDist < 0 || d < bestDist) {
            bestDist = d;
            best = i;
        }
    }
    return best;
}

// Silhouette features of the 26x26 mask:
//   square   full top and bottom rows
//   triangle full bottom row only
//   circle   ~0.80 fill, covers the near-corner probe
//   clover   ~0.65 fill
//   diamond  ~0.54 fill
ShapeId classifySilhouette(const std::vector<std::vector<bool>>& mask) {
    const int n = static_cast<int>(mask.size());
    int area = 0;
    for (const auto& row : mask) area += static_cast<int>(std::count(row.begin(), row.end(), true));
    const auto rowCount = [&](int y) { return static_cast<int>(std::count(mask[y].begin(), mask[y].end(), true)); };
    const int wide = (n * 3) / 4;
    const double fill = static_cast<double>(area) / (n * n);
    if (rowCount(n - 1) >= wide) return ShapeId(rowCount(0) >= wide ? ShapeKind::Square : ShapeKind::Triangle);
    if (fill >= 0.72) return ShapeId(ShapeKind::Circle);
    if (fill >= 0.59) return ShapeId(ShapeKind::Clover);
    return ShapeId(ShapeKind::Diamond);
}

}  // namespace

std::array<Stimulus, kGridCells> decodeRaster(const gen::Image& image) {
    if (image.width() != 256 || image.height() != 256) {
        throw std::invalid_argument("decodeRaster expects a 256x256 image");
    }
    constexpr int cell = 32;
    constexpr int pad = 3;
    constexpr int inner = cell - 2 * pad;
    const Rgb white{255, 255, 255};
    std::array<Stimulus, kGridCells> out{};
    for (int r = 0; r < kGridDim; ++r) {
        for (int c = 0; c < kGridDim; ++c) {
            std::vector<std::vector<bool>> mask(inner, std::vector<bool>(inner, false));
            std::array<int, kNumColors> votes{};
            for (int y = 0; y < inner; ++y) {
                for (int x = 0; x < inner; ++x) {
                    const Rgb px = image.at(c * cell + pad + x, r * cell + pad + y);
                    if (px == white) continue;
                    mask[y][x] = true;
                    ++votes[static_cast<std::size_t>(nearestPaletteColor(px))];
                }
            }
            const auto color = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
            out[static_cast<std::size_t>(r * kGridDim + c)] = {ColorId(color), classifySilhouette(mask)};
        }
    }
    return out;
}

}  // namespace olab::oracle
