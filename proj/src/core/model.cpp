#include "olab/core/model.hpp"

#include <sstream>

namespace olab {

namespace {

constexpr std::array<std::string_view, kNumColors> kPalette = {
    "#1B9E77", "#D95F02", "#7570B3", "#E7298A", "#66A61E", "#E6AB02", "#A6761D"};

constexpr std::array<std::string_view, kNumShapes> kShapeNames = {
    "triangle", "circle", "square", "clover", "diamond"};

int hexNibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return c - 'a' + 10;
}

void checkRange(int nColors, int nShapes) {
    if (nColors < 1 || nColors > kNumColors) {
        throw RangeError("nColors out of range [1,7]: " + std::to_string(nColors));
    }
    if (nShapes < 1 || nShapes > kNumShapes) {
        throw RangeError("nShapes out of range [1,5]: " + std::to_string(nShapes));
    }
}

}  // namespace

ColorId::ColorId(int index) : index_(index) {
    if (index < 0 || index >= kNumColors) {
        throw RangeError("color index out of range [0,6]: " + std::to_string(index));
    }
}

std::string_view ColorId::hex() const { return kPalette[static_cast<std::size_t>(index_)]; }

Rgb ColorId::rgb() const {
    const auto h = hex();
    auto byte = [&](std::size_t at) {
        return static_cast<std::uint8_t>(hexNibble(h[at]) * 16 + hexNibble(h[at + 1]));
    };
    return {byte(1), byte(3), byte(5)};
}

ShapeId::ShapeId(int index) : index_(index) {
    if (index < 0 || index >= kNumShapes) {
        throw RangeError("shape index out of range [0,4]: " + std::to_string(index));
    }
}

std::string_view ShapeId::name() const { return kShapeNames[static_cast<std::size_t>(index_)]; }

const std::array<std::string_view, kNumColors>& paletteHex() { return kPalette; }
const std::array<std::string_view, kNumShapes>& shapeNames() { return kShapeNames; }

std::string_view nameOf(OutlierType type) {
    switch (type) {
        case OutlierType::Color: return "color";
        case OutlierType::Shape: return "shape";
        case OutlierType::Redundant: return "redundant";
        case OutlierType::Conjunction: return "conjunction";
    }
    return "?";
}

OutlierType outlierTypeFromString(std::string_view name) {
    for (auto t : kAllTypes) {
        if (nameOf(t) == name) return t;
    }
    throw RangeError("unknown outlier type: " + std::string(name));
}

bool isFeasible(OutlierType type, int nColors, int nShapes) {
    checkRange(nColors, nShapes);
    const bool needsColor = type != OutlierType::Shape;
    const bool needsShape = type != OutlierType::Color;
    if (needsColor && nColors < 2) return false;
    if (needsShape && nShapes < 2) return false;
    if (nColors == 1 && nShapes == 1) return false;
    // High-valued pairs dropped from the whole design; (7,5) cannot fit a
    // conjunction grid and is excluded for every type.
    if ((nColors == 7 && nShapes == 4) || (nColors == 6 && nShapes == 5) ||
        (nColors == 7 && nShapes == 5)) {
        return false;
    }
    return true;
}

std::vector<TypeTriple> feasibleTriples() {
    std::vector<TypeTriple> out;
    for (auto t : kAllTypes) {
        for (int c = 1; c <= kNumColors; ++c) {
            for (int s = 1; s <= kNumShapes; ++s) {
                if (isFeasible(t, c, s)) out.push_back({t, c, s});
            }
        }
    }
    return out;
}

std::vector<Combination> enumerateCombinations() {
    std::vector<Combination> out;
    for (const auto& t : feasibleTriples()) {
        for (int color = 0; color < kNumColors; ++color) {
            for (int shape = 0; shape < kNumShapes; ++shape) {
                out.push_back({t.type, t.nColors, t.nShapes, ColorId(color), ShapeId(shape)});
            }
        }
    }
    return out;
}

std::vector<GridConfig> expandWithPositions(const std::vector<Combination>& combinations) {
    std::vector<GridConfig> out;
    out.reserve(combinations.size() * kGridCells);
    for (const auto& c : combinations) {
        for (int pos = 0; pos < kGridCells; ++pos) {
            out.push_back({c.type, c.nColors, c.nShapes, c.outlierColor, c.outlierShape, pos});
        }
    }
    return out;
}

int diffStimuliClosedForm(OutlierType type, int nColors, int nShapes) {
    if (!isFeasible(type, nColors, nShapes)) {
        throw DomainError("infeasible configuration (" + std::string(nameOf(type)) + ", " +
                          std::to_string(nColors) + ", " + std::to_string(nShapes) + ")");
    }
    switch (type) {
        case OutlierType::Color: return (nColors - 1) * nShapes;
        case OutlierType::Shape: return nColors * (nShapes - 1);
        case OutlierType::Redundant: return (nColors - 1) * (nShapes - 1);
        case OutlierType::Conjunction: return nColors * nShapes - 1;
    }
    return 0;
}

void checkConfig(const GridConfig& config) {
    if (config.outlierPos < 0 || config.outlierPos >= kGridCells) {
        throw RangeError("outlierPos out of range [0,63]: " + std::to_string(config.outlierPos));
    }
    if (!isFeasible(config.type, config.nColors, config.nShapes)) {
        throw DomainError("infeasible configuration: " + describe(config));
    }
}

std::string describe(const GridConfig& config) {
    std::ostringstream os;
    os << nameOf(config.type) << " c=" << config.nColors << " s=" << config.nShapes
       << " color=" << config.outlierColor.hex() << " shape=" << config.outlierShape.name()
       << " pos=" << config.outlierPos;
    return os.str();
}

}  // namespace olab
