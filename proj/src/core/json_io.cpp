#include "olab/core/json_io.hpp"

#include <cstdio>

namespace olab {

void to_json(nlohmann::json& j, const GridConfig& config) {
    j = nlohmann::json{{"type", nameOf(config.type)},
                       {"nColors", config.nColors},
                       {"nShapes", config.nShapes},
                       {"outlierColor", config.outlierColor.index()},
                       {"outlierShape", config.outlierShape.index()},
                       {"outlierPos", config.outlierPos}};
}

void from_json(const nlohmann::json& j, GridConfig& config) {
    config.type = outlierTypeFromString(j.at("type").get<std::string>());
    config.nColors = j.at("nColors").get<int>();
    config.nShapes = j.at("nShapes").get<int>();
    config.outlierColor = ColorId(j.at("outlierColor").get<int>());
    config.outlierShape = ShapeId(j.at("outlierShape").get<int>());
    config.outlierPos = j.at("outlierPos").get<int>();
}

void to_json(nlohmann::json& j, const TypeTriple& triple) {
    j = nlohmann::json{
        {"type", nameOf(triple.type)}, {"nColors", triple.nColors}, {"nShapes", triple.nShapes}};
}

void from_json(const nlohmann::json& j, TypeTriple& triple) {
    triple.type = outlierTypeFromString(j.at("type").get<std::string>());
    triple.nColors = j.at("nColors").get<int>();
    triple.nShapes = j.at("nShapes").get<int>();
}

void to_json(nlohmann::json& j, const Stimulus& stimulus) {
    j = nlohmann::json::array({stimulus.color.index(), stimulus.shape.index()});
}

void from_json(const nlohmann::json& j, Stimulus& stimulus) {
    stimulus.color = ColorId(j.at(0).get<int>());
    stimulus.shape = ShapeId(j.at(1).get<int>());
}

nlohmann::json vocabularyJson() {
    nlohmann::json colors = nlohmann::json::array();
    for (int i = 0; i < kNumColors; ++i) {
        colors.push_back({{"index", i}, {"hex", ColorId(i).hex()}});
    }
    nlohmann::json shapes = nlohmann::json::array();
    for (int i = 0; i < kNumShapes; ++i) {
        shapes.push_back({{"index", i}, {"name", ShapeId(i).name()}});
    }
    nlohmann::json types = nlohmann::json::array();
    for (auto t : kAllTypes) types.push_back(nameOf(t));
    return {{"version", kPaletteVersion},
            {"colors", colors},
            {"shapes", shapes},
            {"types", types},
            {"grid", {{"rows", kGridDim}, {"cols", kGridDim}}}};
}

std::string contentHash(const nlohmann::json& j) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace olab
