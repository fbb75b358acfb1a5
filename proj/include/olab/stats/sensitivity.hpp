#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/stats/report.hpp"

namespace olab::stats {

inline constexpr int kSensitivitySamplings = 10;

/// 0.10, 0.15, ..., 0.95.
std::vector<double> defaultSensitivityFractions();

struct SensitivityPoint {
    double fraction = 0.0;
    std::size_t subsetSize = 0;
    double meanRho = 0.0;
    std::vector<double> rhos;
};

struct SensitivityCurve {
    Parameter parameter = Parameter::Type;
    Measure measure = Measure::ER;
    std::size_t subjectCount = 0;
    std::vector<SensitivityPoint> points;
};

/// For each fraction, draws `samplings` seeded subject subsets of size
/// floor(fraction * subjects), compares the per-value mean of the measure on
/// the subset with the full set through Spearman, and averages the rho values.
/// Fractions giving an empty subset are skipped with a warning.
SensitivityCurve sensitivityAnalysis(const std::vector<Observation>& observations, Parameter parameter,
                                     Measure measure, std::uint64_t seed,
                                     const std::vector<double>& fractions = defaultSensitivityFractions(),
                                     int samplings = kSensitivitySamplings);

nlohmann::json toJson(const SensitivityCurve& curve);
SensitivityCurve sensitivityFromJson(const nlohmann::json& j);

}  // namespace olab::stats
