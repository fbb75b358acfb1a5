#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace olab::stats {

enum class Measure { ER, RT };
std::string_view nameOf(Measure measure);
Measure measureFromString(std::string_view name);

struct LabeledSample {
    std::string label;
    std::vector<double> values;
};

struct Arc {
    std::string a;
    std::string b;
    double p = 1.0;
    friend bool operator==(const Arc&, const Arc&) = default;
};

/// Omnibus-gated pairwise comparison result for one parameter.
struct SignificanceGraph {
    std::string parameter;
    Measure measure = Measure::ER;
    double anovaH = 0.0;
    double anovaP = 1.0;
    double alpha = 0.05;
    std::vector<Arc> arcs;  ///< empty unless anovaP < alpha; every p < alpha

    bool significant() const { return anovaP < alpha; }
    bool hasArc(std::string_view a, std::string_view b) const;
    const Arc* findArc(std::string_view a, std::string_view b) const;
};

/// Kruskal-Wallis over the nonempty samples; when it rejects at `alpha`,
/// every pair is compared with the rank-sum test and pairs with p < alpha
/// become arcs. Fewer than two nonempty samples gives anovaP = 1.
SignificanceGraph significanceArcs(const std::string& parameter, Measure measure,
                                   const std::vector<LabeledSample>& samples, double alpha);

nlohmann::json toJson(const SignificanceGraph& graph);
SignificanceGraph graphFromJson(const nlohmann::json& j);

}  // namespace olab::stats
