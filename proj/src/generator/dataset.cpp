#include "olab/generator/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "olab/core/json_io.hpp"
#include "olab/core/random.hpp"
#include "olab/generator/synthesize.hpp"

namespace olab::gen {

namespace fs = std::filesystem;

std::string_view nameOf(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "?";
}

Split splitFromString(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "validation") return Split::Validation;
    if (name == "test") return Split::Test;
    throw std::invalid_argument("unknown split: " + std::string(name));
}

std::string_view nameOf(Scale scale) { return scale == Scale::Full ? "full" : "desk"; }

Scale scaleFromString(std::string_view name) {
    if (name == "full") return Scale::Full;
    if (name == "desk") return Scale::Desk;
    throw std::invalid_argument("unknown scale: " + std::string(name));
}

std::vector<const ManifestEntry*> Manifest::inSplit(Split split) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : entries) {
        if (e.split == split) out.push_back(&e);
    }
    return out;
}

namespace {

std::string makeId(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "g%07zu", index);
    return buf;
}

void checkRatios(const std::array<double, 3>& r) {
    for (double v : r) {
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("split ratios must be >= 0");
    }
    if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) {
        throw std::invalid_argument("split ratios must sum to 1");
    }
}

// Stratified split assignment over the entries of one triple.
void assignSplits(std::vector<ManifestEntry*>& group, const std::array<double, 3>& ratios,
                  Engine& rng) {
    shuffleInPlace(group, rng);
    const auto k = group.size();
    auto nTrain = static_cast<std::size_t>(std::llround(static_cast<double>(k) * ratios[0]));
    auto nVal = static_cast<std::size_t>(std::llround(static_cast<double>(k) * ratios[1]));
    nTrain = std::min(nTrain, k);
    nVal = std::min(nVal, k - nTrain);
    if (ratios[2] == 0.0) nVal = k - nTrain;
    for (std::size_t i = 0; i < k; ++i) {
        group[i]->split = i < nTrain ? Split::Train : (i < nTrain + nVal ? Split::Validation : Split::Test);
    }
}

}  // namespace

Manifest buildManifest(const DatasetOptions& options) {
    checkRatios(options.splitRatios);
    Manifest manifest;
    manifest.header.masterSeed = options.masterSeed;
    manifest.header.scale = options.scale;
    manifest.header.splitRatios = options.splitRatios;

    std::vector<GridConfig> configs;
    if (options.scale == Scale::Full) {
        if (!options.triples.empty()) {
            throw std::invalid_argument("triple restriction is only supported at desk scale");
        }
        configs = expandWithPositions(enumerateCombinations());
    } else {
        auto triples = options.triples.empty() ? feasibleTriples() : options.triples;
        for (const auto& t : triples) {
            if (!isFeasible(t)) throw DomainError("infeasible triple in dataset options");
        }
        Engine rng(deriveSeed(options.masterSeed, "desk-layout"));
        const std::size_t n = triples.size();
        const std::size_t base = options.deskCount / n;
        const std::size_t extra = options.deskCount % n;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        shuffleInPlace(order, rng);
        std::vector<std::size_t> counts(n, base);
        for (std::size_t i = 0; i < extra; ++i) counts[order[i]] += 1;

        for (std::size_t ti = 0; ti < n; ++ti) {
            std::vector<int> positions(kGridCells);
            std::iota(positions.begin(), positions.end(), 0);
            shuffleInPlace(positions, rng);
            std::vector<int> pairs(kNumColors * kNumShapes);
            std::iota(pairs.begin(), pairs.end(), 0);
            shuffleInPlace(pairs, rng);
            for (std::size_t k = 0; k < counts[ti]; ++k) {
                const int pair = pairs[k % pairs.size()];
                configs.push_back({triples[ti].type, triples[ti].nColors, triples[ti].nShapes,
                                   ColorId(pair / kNumShapes), ShapeId(pair % kNumShapes),
                                   positions[k % positions.size()]});
            }
        }
    }

    manifest.entries.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        ManifestEntry e;
        e.id = makeId(i);
        e.config = configs[i];
        e.seed = deriveSeed(options.masterSeed, e.id);
        e.imagePath = "images/" + e.id + ".png";
        manifest.entries.push_back(std::move(e));
    }

    std::map<TypeTriple, std::vector<ManifestEntry*>> groups;
    for (auto& e : manifest.entries) {
        groups[{e.config.type, e.config.nColors, e.config.nShapes}].push_back(&e);
    }
    Engine splitRng(deriveSeed(options.masterSeed, "splits"));
    for (auto& [triple, group] : groups) assignSplits(group, options.splitRatios, splitRng);

    manifest.header.entryCount = manifest.entries.size();
    return manifest;
}

Grid entryGrid(const ManifestEntry& entry) { return synthesizeGrid(entry.config, entry.seed); }

void writeImages(const Manifest& manifest, const fs::path& dir,
                 const std::function<void(std::size_t, std::size_t)>& progress) {
    fs::create_directories(dir / "images");
    const auto total = manifest.entries.size();
    for (std::size_t i = 0; i < total; ++i) {
        const auto& e = manifest.entries[i];
        try {
            writePng(dir / e.imagePath, renderGrid(entryGrid(e), manifest.header.render));
        } catch (const std::exception& ex) {
            throw std::runtime_error("entry " + e.id + ": " + ex.what());
        }
        if (progress) progress(i + 1, total);
    }
}

nlohmann::json entryToJson(const ManifestEntry& entry) {
    return {{"id", entry.id},
            {"config", entry.config},
            {"seed", entry.seed},
            {"split", nameOf(entry.split)},
            {"imagePath", entry.imagePath},
            {"groundTruth", entry.groundTruth()}};
}

ManifestEntry entryFromJson(const nlohmann::json& j) {
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.config = j.at("config").get<GridConfig>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.split = splitFromString(j.at("split").get<std::string>());
    e.imagePath = j.at("imagePath").get<std::string>();
    if (j.contains("groundTruth") && j.at("groundTruth").get<int>() != e.config.outlierPos) {
        throw std::runtime_error("entry " + e.id + ": groundTruth disagrees with config.outlierPos");
    }
    return e;
}

nlohmann::json headerToJson(const ManifestHeader& h) {
    return {{"paletteVersion", h.paletteVersion},
            {"palette", vocabularyJson()},
            {"render",
             {{"imageSize", h.render.imageSize},
              {"gridDim", h.render.gridDim},
              {"cellSize", h.render.cellSize},
              {"padding", h.render.padding},
              {"background", "#FFFFFF"}}},
            {"masterSeed", h.masterSeed},
            {"toolVersion", h.toolVersion},
            {"scale", nameOf(h.scale)},
            {"splitRatios", h.splitRatios},
            {"entryCount", h.entryCount},
            {"configHash", h.configHash}};
}

ManifestHeader headerFromJson(const nlohmann::json& j) {
    ManifestHeader h;
    h.paletteVersion = j.at("paletteVersion").get<std::string>();
    const auto& r = j.at("render");
    h.render.imageSize = r.at("imageSize").get<int>();
    h.render.gridDim = r.at("gridDim").get<int>();
    h.render.cellSize = r.at("cellSize").get<int>();
    h.render.padding = r.at("padding").get<int>();
    h.masterSeed = j.at("masterSeed").get<std::uint64_t>();
    h.toolVersion = j.at("toolVersion").get<std::string>();
    h.scale = scaleFromString(j.at("scale").get<std::string>());
    h.splitRatios = j.at("splitRatios").get<std::array<double, 3>>();
    h.entryCount = j.at("entryCount").get<std::size_t>();
    h.configHash = j.value("configHash", "");
    return h;
}

fs::path manifestFile(const fs::path& dir) { return dir / "manifest.jsonl"; }
fs::path headerFile(const fs::path& dir) { return dir / "manifest.header.json"; }

void saveManifest(const Manifest& manifest, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream out(headerFile(dir));
        out << headerToJson(manifest.header).dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write " + headerFile(dir).string());
    }
    std::ofstream out(manifestFile(dir));
    for (const auto& e : manifest.entries) out << entryToJson(e).dump() << '\n';
    if (!out) throw std::runtime_error("cannot write " + manifestFile(dir).string());
}

Manifest loadManifest(const fs::path& dirOrFile) {
    const fs::path dir = fs::is_directory(dirOrFile) ? dirOrFile : dirOrFile.parent_path();
    Manifest manifest;
    {
        std::ifstream in(headerFile(dir));
        if (!in) throw std::runtime_error("missing manifest header in " + dir.string());
        manifest.header = headerFromJson(nlohmann::json::parse(in));
    }
    std::ifstream in(manifestFile(dir));
    if (!in) throw std::runtime_error("missing manifest in " + dir.string());
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        try {
            manifest.entries.push_back(entryFromJson(nlohmann::json::parse(line)));
        } catch (const std::exception& ex) {
            throw std::runtime_error(manifestFile(dir).string() + ":" + std::to_string(lineNo) + ": " + ex.what());
        }
    }
    if (manifest.entries.size() != manifest.header.entryCount) {
        throw std::runtime_error("manifest entry count does not match its header");
    }
    return manifest;
}

}  // namespace olab::gen
