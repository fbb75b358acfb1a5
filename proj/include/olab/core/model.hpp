#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace olab {

inline constexpr int kGridDim = 8;
inline constexpr int kGridCells = kGridDim * kGridDim;
inline constexpr int kNumColors = 7;
inline constexpr int kNumShapes = 5;
inline constexpr int kMaxDistinctDistractors = 31;
inline constexpr const char* kPaletteVersion = "dark2-7/v1";

/// Thrown when a parameter lies outside its declared range.
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Thrown when a parameter combination cannot be generated.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

class ColorId {
public:
    constexpr ColorId() = default;
    explicit ColorId(int index);

    constexpr int index() const { return index_; }
    std::string_view hex() const;
    Rgb rgb() const;

    friend constexpr bool operator==(ColorId, ColorId) = default;
    friend constexpr auto operator<=>(ColorId, ColorId) = default;

private:
    int index_ = 0;
};

enum class ShapeKind : int { Triangle = 0, Circle = 1, Square = 2, Clover = 3, Diamond = 4 };

class ShapeId {
public:
    constexpr ShapeId() = default;
    explicit ShapeId(int index);
    ShapeId(ShapeKind kind) : ShapeId(static_cast<int>(kind)) {}

    constexpr int index() const { return index_; }
    ShapeKind kind() const { return static_cast<ShapeKind>(index_); }
    std::string_view name() const;

    friend constexpr bool operator==(ShapeId, ShapeId) = default;
    friend constexpr auto operator<=>(ShapeId, ShapeId) = default;

private:
    int index_ = 0;
};

/// Palette hex codes, index-stable.
const std::array<std::string_view, kNumColors>& paletteHex();
const std::array<std::string_view, kNumShapes>& shapeNames();

enum class OutlierType : int { Color = 0, Shape = 1, Redundant = 2, Conjunction = 3 };
inline constexpr std::array<OutlierType, 4> kAllTypes = {
    OutlierType::Color, OutlierType::Shape, OutlierType::Redundant, OutlierType::Conjunction};

std::string_view nameOf(OutlierType type);
OutlierType outlierTypeFromString(std::string_view name);

struct Stimulus {
    ColorId color;
    ShapeId shape;
    friend bool operator==(const Stimulus&, const Stimulus&) = default;
    friend auto operator<=>(const Stimulus&, const Stimulus&) = default;
};

/// Compact stimulus key in [0, 35).
inline int stimulusKey(const Stimulus& s) { return s.color.index() * kNumShapes + s.shape.index(); }

struct GridConfig {
    OutlierType type = OutlierType::Color;
    int nColors = 2;
    int nShapes = 1;
    ColorId outlierColor;
    ShapeId outlierShape;
    int outlierPos = 0;
    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct Grid {
    std::array<Stimulus, kGridCells> cells{};
    GridConfig config;
    std::uint64_t seed = 0;
};

/// One (type, nColors, nShapes) point of the design space.
struct TypeTriple {
    OutlierType type = OutlierType::Color;
    int nColors = 0;
    int nShapes = 0;
    friend bool operator==(const TypeTriple&, const TypeTriple&) = default;
    friend auto operator<=>(const TypeTriple&, const TypeTriple&) = default;
};

struct Combination {
    OutlierType type = OutlierType::Color;
    int nColors = 0;
    int nShapes = 0;
    ColorId outlierColor;
    ShapeId outlierShape;
    TypeTriple triple() const { return {type, nColors, nShapes}; }
    friend bool operator==(const Combination&, const Combination&) = default;
};

/// Feasibility of a (type, #colors, #shapes) point. Throws RangeError when
/// nColors is outside [1,7] or nShapes outside [1,5].
bool isFeasible(OutlierType type, int nColors, int nShapes);
inline bool isFeasible(const TypeTriple& t) { return isFeasible(t.type, t.nColors, t.nShapes); }

/// All feasible triples in canonical (type, c, s) order.
std::vector<TypeTriple> feasibleTriples();

/// Feasible triples x 7 outlier colors x 5 outlier shapes (3290 entries).
std::vector<Combination> enumerateCombinations();

/// Each combination repeated for outlier positions 0..63 (210560 entries).
std::vector<GridConfig> expandWithPositions(const std::vector<Combination>& combinations);

/// Number of distinct distractor stimuli under full-heterogeneity filling.
int diffStimuliClosedForm(OutlierType type, int nColors, int nShapes);

/// Throws RangeError / DomainError when the config is out of range or infeasible.
void checkConfig(const GridConfig& config);

std::string describe(const GridConfig& config);

}  // namespace olab
