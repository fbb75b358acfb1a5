#pragma once

#include <nlohmann/json.hpp>

#include "olab/core/model.hpp"

namespace olab {

void to_json(nlohmann::json& j, const GridConfig& config);
void from_json(const nlohmann::json& j, GridConfig& config);

void to_json(nlohmann::json& j, const TypeTriple& triple);
void from_json(const nlohmann::json& j, TypeTriple& triple);

void to_json(nlohmann::json& j, const Stimulus& stimulus);
void from_json(const nlohmann::json& j, Stimulus& stimulus);

/// Palette and shape vocabulary for clients that render stimuli.
nlohmann::json vocabularyJson();

/// Canonical serialization hash (FNV-1a over the compact dump), hex encoded.
std::string contentHash(const nlohmann::json& j);

}  // namespace olab
