#include "olab/stats/significance.hpp"

#include <stdexcept>

#include "olab/stats/rank_tests.hpp"

namespace olab::stats {

std::string_view nameOf(Measure measure) { return measure == Measure::ER ? "ER" : "RT"; }

Measure measureFromString(std::string_view name) {
    if (name == "ER") return Measure::ER;
    if (name == "RT") return Measure::RT;
    throw std::invalid_argument("unknown measure: " + std::string(name));
}

const Arc* SignificanceGraph::findArc(std::string_view a, std::string_view b) const {
    for (const auto& arc : arcs) {
        if ((arc.a == a && arc.b == b) || (arc.a == b && arc.b == a)) return &arc;
    }
    return nullptr;
}

bool SignificanceGraph::hasArc(std::string_view a, std::string_view b) const { return findArc(a, b) != nullptr; }

SignificanceGraph significanceArcs(const std::string& parameter, Measure measure,
                                   const std::vector<LabeledSample>& samples, double alpha) {
    SignificanceGraph graph;
    graph.parameter = parameter;
    graph.measure = measure;
    graph.alpha = alpha;

    std::vector<const LabeledSample*> present;
    for (const auto& s : samples) {
        if (!s.values.empty()) present.push_back(&s);
    }
    if (present.size() < 2) return graph;

    std::vector<std::vector<double>> groups;
    for (const auto* s : present) groups.push_back(s->values);
    const auto kw = kruskalWallis(groups);
    graph.anovaH = kw.h;
    graph.anovaP = kw.p;
    if (!(kw.p < alpha)) return graph;

    for (std::size_t i = 0; i < present.size(); ++i) {
        for (std::size_t j = i + 1; j < present.size(); ++j) {
            const auto test = wilcoxonRankSum(present[i]->values, present[j]->values);
            if (test.p < alpha) graph.arcs.push_back({present[i]->label, present[j]->label, test.p});
        }
    }
    return graph;
}

nlohmann::json toJson(const SignificanceGraph& graph) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const auto& a : graph.arcs) arcs.push_back({{"a", a.a}, {"b", a.b}, {"p", a.p}});
    return {{"parameter", graph.parameter},
            {"measure", nameOf(graph.measure)},
            {"anovaH", graph.anovaH},
            {"anovaP", graph.anovaP},
            {"alpha", graph.alpha},
            {"arcs", arcs}};
}

SignificanceGraph graphFromJson(const nlohmann::json& j) {
    SignificanceGraph g;
    g.parameter = j.at("parameter").get<std::string>();
    g.measure = measureFromString(j.at("measure").get<std::string>());
    g.anovaH = j.at("anovaH").get<double>();
    g.anovaP = j.at("anovaP").get<double>();
    g.alpha = j.at("alpha").get<double>();
    for (const auto& a : j.at("arcs")) {
        g.arcs.push_back({a.at("a").get<std::string>(), a.at("b").get<std::string>(), a.at("p").get<double>()});
    }
    return g;
}

}  // namespace olab::stats
