#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/core/model.hpp"
#include "olab/generator/dataset.hpp"
#include "olab/stats/report.hpp"

namespace olab::reducer {

struct ReductionRules {
    std::set<int> keepColors{2, 4, 5, 7};
    std::set<int> keepShapes{2, 3, 5};
    std::set<std::pair<int, int>> excludePairs{{7, 5}};
    int trialsPerCombination = 1;
};

/// Throws std::invalid_argument for out-of-range values or an empty set.
void checkRules(const ReductionRules& rules);
nlohmann::json toJson(const ReductionRules& rules);
ReductionRules rulesFromJson(const nlohmann::json& j);

/// Advisory note on why a value was removed, citing the difficulty report.
struct Justification {
    std::string parameter;  ///< "nColors" or "nShapes"
    int value = 0;
    std::string note;
};

struct Reduction {
    std::vector<TypeTriple> cells;
    std::vector<Justification> justifications;
};

/// Feasible triples kept by the rules. Throws std::invalid_argument if a
/// type loses every cell. `report` (optional) feeds the justifications.
Reduction reduceParameterSpace(const ReductionRules& rules, const stats::PerformanceReport* report = nullptr);

struct TrialSet {
    std::uint64_t orderSeed = 0;
    std::string manifestHash;
    std::vector<TypeTriple> cells;
    std::vector<gen::ManifestEntry> trials;            ///< evaluation trials in global order
    std::vector<gen::ManifestEntry> tutorialSolved;    ///< one per type
    std::vector<gen::ManifestEntry> tutorialFeedback;  ///< one per type
    std::vector<gen::ManifestEntry> practice;          ///< two per type
};

inline constexpr int kPracticeTrials = 8;

/// Picks `trialsPerCombination` test-split entries per cell, balancing outlier
/// color, shape and position greedily, then shuffles the global order. Tutorial
/// and practice entries come from the remaining test entries of the cells.
/// Throws std::invalid_argument naming the first uncovered cell.
TrialSet selectTrialImages(const std::vector<TypeTriple>& cells, const gen::Manifest& manifest, std::uint64_t seed,
                           int trialsPerCombination = 1);

nlohmann::json toJson(const TrialSet& set);
TrialSet trialSetFromJson(const nlohmann::json& j);
void saveTrialSet(const TrialSet& set, const std::filesystem::path& file);
TrialSet loadTrialSet(const std::filesystem::path& file);

std::string describe(const TypeTriple& cell);

}  // namespace olab::reducer
