#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/stats/report.hpp"

namespace olab::stats {

enum class HypothesisId { Type, Conj, Red, Color, Shape };
enum class Verdict { Accepted, Rejected, Inconclusive };

std::string_view nameOf(HypothesisId id);
std::string_view nameOf(Verdict verdict);

struct HypothesisVerdict {
    HypothesisId id = HypothesisId::Type;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> evidence;
};

/// Mechanical decision rules over the overall and per-type graphs.
/// A graph the rule needs that is absent from the report gives Inconclusive.
std::vector<HypothesisVerdict> evaluateHypotheses(const PerformanceReport& report);

nlohmann::json toJson(const std::vector<HypothesisVerdict>& verdicts);

}  // namespace olab::stats
