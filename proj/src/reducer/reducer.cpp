#include "olab/reducer/reducer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "olab/core/json_io.hpp"
#include "olab/core/random.hpp"

namespace olab::reducer {

std::string describe(const TypeTriple& cell) {
    return std::string(nameOf(cell.type)) + " (" + std::to_string(cell.nColors) + " colors, " + std::to_string(cell.nShapes) +
           " shapes)";
}

void checkRules(const ReductionRules& rules) {
    if (rules.keepColors.empty() || rules.keepShapes.empty()) throw std::invalid_argument("rules keep no colors or no shapes");
    for (int c : rules.keepColors) {
        if (c < 1 || c > kNumColors) throw std::invalid_argument("keepColors value out of range: " + std::to_string(c));
    }
    for (int s : rules.keepShapes) {
        if (s < 1 || s > kNumShapes) throw std::invalid_argument("keepShapes value out of range: " + std::to_string(s));
    }
    if (rules.trialsPerCombination < 1) throw std::invalid_argument("trialsPerCombination must be positive");
}

nlohmann::json toJson(const ReductionRules& rules) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [c, s] : rules.excludePairs) pairs.push_back({c, s});
    return {{"keepColors", rules.keepColors},
            {"keepShapes", rules.keepShapes},
            {"excludePairs", pairs},
            {"trialsPerCombination", rules.trialsPerCombination}};
}

ReductionRules rulesFromJson(const nlohmann::json& j) {
    ReductionRules rules;
    if (j.contains("keepColors")) rules.keepColors = j.at("keepColors").get<std::set<int>>();
    if (j.contains("keepShapes")) rules.keepShapes = j.at("keepShapes").get<std::set<int>>();
    if (j.contains("excludePairs")) {
        rules.excludePairs.clear();
        for (const auto& p : j.at("excludePairs")) rules.excludePairs.insert({p.at(0).get<int>(), p.at(1).get<int>()});
    }
    rules.trialsPerCombination = j.value("trialsPerCombination", rules.trialsPerCombination);
    return rules;
}

namespace {

std::string neighbourNote(const stats::PerformanceReport& report, stats::Parameter parameter, int value) {
    const auto* t = report.find(stats::kOverallScope, parameter, stats::Measure::ER);
    if (!t) return "no overall ER table in the report";
    const auto* row = t->row(std::to_string(value));
    std::string note;
    if (row && row->n > 0) note = "ER " + std::to_string(row->mean) + "; ";
    std::vector<std::string> parts;
    for (int other : {value - 1, value + 1}) {
        if (!t->row(std::to_string(other))) continue;
        const bool arc = t->graph.hasArc(std::to_string(value), std::to_string(other));
        parts.push_back(std::to_string(value) + "-" + std::to_string(other) + (arc ? " significant" : " not significant"));
    }
    if (parts.empty()) return note + "no adjacent values in the report";
    for (std::size_t i = 0; i < parts.size(); ++i) note += (i ? ", " : "") + parts[i];
    return note;
}

}  // namespace

Reduction reduceParameterSpace(const ReductionRules& rules, const stats::PerformanceReport* report) {
    checkRules(rules);
    Reduction out;
    std::map<OutlierType, int> perType;
    for (const auto& t : feasibleTriples()) {
        if (!rules.keepColors.count(t.nColors) || !rules.keepShapes.count(t.nShapes)) continue;
        if (rules.excludePairs.count({t.nColors, t.nShapes})) continue;
        out.cells.push_back(t);
        ++perType[t.type];
    }
    for (auto type : kAllTypes) {
        if (perType[type] == 0) throw std::invalid_argument("rules remove every cell of type " + std::string(nameOf(type)));
    }
    auto justify = [&](stats::Parameter parameter, int maxValue, const std::set<int>& keep) {
        for (int v = 1; v <= maxValue; ++v) {
            if (keep.count(v)) continue;
            Justification j;
            j.parameter = std::string(nameOf(parameter));
            j.value = v;
            j.note = report ? neighbourNote(*report, parameter, v) : "removed by rule; no report supplied";
            out.justifications.push_back(std::move(j));
        }
    };
    justify(stats::Parameter::NColors, kNumColors, rules.keepColors);
    justify(stats::Parameter::NShapes, kNumShapes, rules.keepShapes);
    return out;
}

namespace {

struct Balance {
    std::array<int, kNumColors> colors{};
    std::array<int, kNumShapes> shapes{};
    std::array<int, kGridCells> positions{};

    /// Squared counts penalize piling onto an already frequent value.
    int cost(const GridConfig& c) const {
        const int col = colors[static_cast<std::size_t>(c.outlierColor.index())];
        const int sh = shapes[static_cast<std::size_t>(c.outlierShape.index())];
        const int pos = positions[static_cast<std::size_t>(c.outlierPos)];
        return col * col + sh * sh + pos * pos;
    }
    void add(const GridConfig& c) {
        ++colors[static_cast<std::size_t>(c.outlierColor.index())];
        ++shapes[static_cast<std::size_t>(c.outlierShape.index())];
        ++positions[static_cast<std::size_t>(c.outlierPos)];
    }
};

/// Lowest-cost candidate; candidates are pre-shuffled so ties are seeded.
std::size_t pickBalanced(const std::vector<const gen::ManifestEntry*>& candidates, const Balance& balance) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (balance.cost(candidates[i]->config) < balance.cost(candidates[best]->config)) best = i;
    }
    return best;
}

}  // namespace

TrialSet selectTrialImages(const std::vector<TypeTriple>& cells, const gen::Manifest& manifest, std::uint64_t seed,
                           int trialsPerCombination) {
    if (cells.empty()) throw std::invalid_argument("no cells to select trials for");
    if (trialsPerCombination < 1) throw std::invalid_argument("trialsPerCombination must be positive");
    std::map<TypeTriple, std::vector<const gen::ManifestEntry*>> byCell;
    for (const auto* e : manifest.inSplit(gen::Split::Test)) {
        byCell[{e->config.type, e->config.nColors, e->config.nShapes}].push_back(e);
    }

    Engine rng(deriveSeed(seed, "trial-selection"));
    for (const auto& cell : cells) {
        auto it = byCell.find(cell);
        if (it == byCell.end() || it->second.size() < static_cast<std::size_t>(trialsPerCombination)) {
            throw std::invalid_argument("test split does not cover cell " + describe(cell));
        }
        shuffleInPlace(it->second, rng);
    }

    TrialSet set;
    set.orderSeed = seed;
    set.manifestHash = manifest.header.configHash;
    set.cells = cells;

    std::vector<std::size_t> cellOrder(cells.size());
    for (std::size_t i = 0; i < cellOrder.size(); ++i) cellOrder[i] = i;
    shuffleInPlace(cellOrder, rng);
    Balance balance;
    for (int round = 0; round < trialsPerCombination; ++round) {
        for (std::size_t ci : cellOrder) {
            auto& candidates = byCell[cells[ci]];
            const std::size_t k = pickBalanced(candidates, balance);
            balance.add(candidates[k]->config);
            set.trials.push_back(*candidates[k]);
            candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    shuffleInPlace(set.trials, rng);

    // Tutorial and practice come from what is left, so they never repeat an
    // evaluation image.
    std::map<OutlierType, std::vector<const gen::ManifestEntry*>> leftByType;
    for (const auto& cell : cells) {
        for (const auto* e : byCell[cell]) leftByType[cell.type].push_back(e);
    }
    auto take = [&](OutlierType type) -> gen::ManifestEntry {
        auto& pool = leftByType[type];
        if (pool.empty()) throw std::invalid_argument("not enough test entries of type " + std::string(nameOf(type)) + " for tutorial and practice");
        const auto k = static_cast<std::size_t>(uniformBelow(rng, pool.size()));
        gen::ManifestEntry e = *pool[k];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        return e;
    };
    for (auto type : kAllTypes) set.tutorialSolved.push_back(take(type));
    for (auto type : kAllTypes) set.tutorialFeedback.push_back(take(type));
    for (int round = 0; round < kPracticeTrials / 4; ++round) {
        for (auto type : kAllTypes) set.practice.push_back(take(type));
    }
    shuffleInPlace(set.practice, rng);
    return set;
}

namespace {

nlohmann::json entries(const std::vector<gen::ManifestEntry>& list) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : list) out.push_back(gen::entryToJson(e));
    return out;
}

std::vector<gen::ManifestEntry> entriesFrom(const nlohmann::json& j) {
    std::vector<gen::ManifestEntry> out;
    for (const auto& e : j) out.push_back(gen::entryFromJson(e));
    return out;
}

}  // namespace

nlohmann::json toJson(const TrialSet& set) {
    return {{"orderSeed", set.orderSeed},
            {"manifestHash", set.manifestHash},
            {"cells", set.cells},
            {"trials", entries(set.trials)},
            {"tutorialSolved", entries(set.tutorialSolved)},
            {"tutorialFeedback", entries(set.tutorialFeedback)},
            {"practice", entries(set.practice)}};
}

TrialSet trialSetFromJson(const nlohmann::json& j) {
    TrialSet set;
    set.orderSeed = j.at("orderSeed").get<std::uint64_t>();
    set.manifestHash = j.value("manifestHash", "");
    set.cells = j.at("cells").get<std::vector<TypeTriple>>();
    set.trials = entriesFrom(j.at("trials"));
    set.tutorialSolved = entriesFrom(j.at("tutorialSolved"));
    set.tutorialFeedback = entriesFrom(j.at("tutorialFeedback"));
    set.practice = entriesFrom(j.at("practice"));
    return set;
}

void saveTrialSet(const TrialSet& set, const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    out << toJson(set).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + file.string());
}

TrialSet loadTrialSet(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    return trialSetFromJson(nlohmann::json::parse(in));
}

}  // namespace olab::reducer
