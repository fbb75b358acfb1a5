#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olab/core/model.hpp"
#include "olab/stats/significance.hpp"

namespace olab::stats {

/// One scored trial: a subject answer or a model prediction.
struct Observation {
    std::string subject;
    GridConfig config;
    std::optional<double> error;  ///< 0 = correct, 1 = wrong; absent when out of time
    std::optional<double> rtMs;   ///< validated answers only
    bool oot = false;
};

enum class Parameter { Type, NColors, NShapes, OutlierColor, OutlierShape, DiffStimuli };
inline constexpr std::array<Parameter, 6> kAllParameters = {
    Parameter::Type,         Parameter::NColors,      Parameter::NShapes,
    Parameter::OutlierColor, Parameter::OutlierShape, Parameter::DiffStimuli};

std::string_view nameOf(Parameter parameter);
Parameter parameterFromString(std::string_view name);

/// Sort key of the config's value for `parameter`.
int parameterKey(Parameter parameter, const GridConfig& config);
std::string parameterLabel(Parameter parameter, int key);

inline constexpr const char* kOverallScope = "overall";

struct ValueSummary {
    std::string label;
    int key = 0;
    std::size_t n = 0;
    double mean = 0.0;  ///< NaN when n = 0
    double sd = 0.0;
};

struct ParameterTable {
    std::string scope;  ///< "overall" or a type name
    Parameter parameter = Parameter::Type;
    Measure measure = Measure::ER;
    std::vector<ValueSummary> rows;
    SignificanceGraph graph;
    std::vector<std::string> coverageGaps;

    const ValueSummary* row(std::string_view label) const;
};

struct OotTable {
    std::string scope;
    Parameter parameter = Parameter::Type;
    std::vector<std::pair<std::string, std::size_t>> counts;
};

struct ReportOptions {
    double alphaOverall = 0.05;
    double alphaPerType = 0.025;
    std::vector<Parameter> parameters{kAllParameters.begin(), kAllParameters.end()};
    std::vector<Measure> measures{Measure::ER, Measure::RT};
    bool perType = true;
    /// Emit a row for every value the feasible design allows in the scope,
    /// even if no observation carries it (reported as a coverage gap).
    bool fullDomain = false;
};

struct PerformanceReport {
    std::size_t observationCount = 0;
    std::size_t ootCount = 0;
    double alphaOverall = 0.05;
    double alphaPerType = 0.025;
    std::vector<ParameterTable> tables;
    std::vector<OotTable> oot;

    const ParameterTable* find(std::string_view scope, Parameter parameter, Measure measure) const;
    /// Mean of the measure over all scored observations (NaN if none).
    double overallMean(Measure measure) const;
    std::size_t scoredCount(Measure measure) const;

    // Totals kept for the recomposition identity.
    double erSum = 0.0;
    std::size_t erCount = 0;
    double rtSum = 0.0;
    std::size_t rtCount = 0;
};

/// Aggregates observations per parameter value, overall and per type, and
/// attaches significance graphs (alphaOverall overall, alphaPerType per type).
/// ER uses observations with an error value, RT those with a response time.
PerformanceReport buildPerformanceReport(const std::vector<Observation>& observations,
                                         const ReportOptions& options = {});

/// Samples of `measure` per value of `parameter` within `scope`.
std::vector<LabeledSample> samplesByValue(const std::vector<Observation>& observations, std::string_view scope,
                                          Parameter parameter, Measure measure);

nlohmann::json toJson(const PerformanceReport& report);
PerformanceReport reportFromJson(const nlohmann::json& j);

}  // namespace olab::stats
