#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/core/model.hpp"
#include "olab/generator/render.hpp"

namespace olab::gen {

inline constexpr const char* kToolVersion = "olab 0.3.0";

enum class Split { Train, Validation, Test };
std::string_view nameOf(Split split);
Split splitFromString(std::string_view name);

enum class Scale { Full, Desk };
std::string_view nameOf(Scale scale);
Scale scaleFromString(std::string_view name);

struct ManifestEntry {
    std::string id;
    GridConfig config;
    std::uint64_t seed = 0;
    Split split = Split::Train;
    std::string imagePath;  // relative to the dataset directory
    int groundTruth() const { return config.outlierPos; }
};

struct ManifestHeader {
    std::string paletteVersion = kPaletteVersion;
    RenderSpec render;
    std::uint64_t masterSeed = 0;
    std::string toolVersion = kToolVersion;
    Scale scale = Scale::Desk;
    std::array<double, 3> splitRatios{0.8, 0.1, 0.1};
    std::size_t entryCount = 0;
    std::string configHash;
};

struct Manifest {
    ManifestHeader header;
    std::vector<ManifestEntry> entries;

    std::vector<const ManifestEntry*> inSplit(Split split) const;
};

struct DatasetOptions {
    Scale scale = Scale::Desk;
    std::size_t deskCount = 6400;
    std::array<double, 3> splitRatios{0.8, 0.1, 0.1};
    std::uint64_t masterSeed = 1;
    /// Restricts the design to these triples (desk scale only); empty = all 94.
    std::vector<TypeTriple> triples;
};

/// Builds the manifest (no files). Full scale: all 210560 configs. Desk
/// scale: `deskCount` entries spread evenly over the triples with positions
/// and outlier color/shape cycled within each triple. Splits are stratified
/// per triple.
Manifest buildManifest(const DatasetOptions& options);

/// Renders every entry to `dir / entry.imagePath`. Failures name the entry.
void writeImages(const Manifest& manifest, const std::filesystem::path& dir,
                 const std::function<void(std::size_t, std::size_t)>& progress = {});

/// Re-synthesizes the grid an entry describes.
Grid entryGrid(const ManifestEntry& entry);

nlohmann::json entryToJson(const ManifestEntry& entry);
ManifestEntry entryFromJson(const nlohmann::json& j);
nlohmann::json headerToJson(const ManifestHeader& header);
ManifestHeader headerFromJson(const nlohmann::json& j);

/// manifest.jsonl (one entry per line) plus manifest.header.json.
void saveManifest(const Manifest& manifest, const std::filesystem::path& dir);
Manifest loadManifest(const std::filesystem::path& dirOrFile);

std::filesystem::path manifestFile(const std::filesystem::path& dir);
std::filesystem::path headerFile(const std::filesystem::path& dir);

}  // namespace olab::gen
