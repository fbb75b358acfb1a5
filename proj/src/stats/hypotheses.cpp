#include "olab/stats/hypotheses.hpp"

#include <cmath>
#include <sstream>

namespace olab::stats {

namespace {

const std::string kColor{nameOf(OutlierType::Color)};
const std::string kShape{nameOf(OutlierType::Shape)};
const std::string kRed{nameOf(OutlierType::Redundant)};
const std::string kConj{nameOf(OutlierType::Conjunction)};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string tableName(const ParameterTable& t) {
    return std::string(nameOf(t.measure)) + " " + std::string(nameOf(t.parameter)) + " [" + t.scope + "]";
}

/// Collects evidence while checking conditions; records a missing input.
struct Rule {
    const PerformanceReport& report;
    HypothesisVerdict out;
    bool missing = false;
    bool holds = true;

    const ParameterTable* table(std::string_view scope, Parameter p, Measure m) {
        const auto* t = report.find(scope, p, m);
        if (!t) {
            missing = true;
            out.evidence.push_back("missing table " + std::string(nameOf(m)) + " " + std::string(nameOf(p)) + " [" +
                                   std::string(scope) + "]");
        }
        return t;
    }

    double mean(const ParameterTable& t, std::string_view label) {
        const auto* r = t.row(label);
        if (!r || r->n == 0 || std::isnan(r->mean)) {
            missing = true;
            out.evidence.push_back("no data for " + std::string(label) + " in " + tableName(t));
            return std::nan("");
        }
        return r->mean;
    }

    void require(bool ok, const std::string& fact) {
        out.evidence.push_back((ok ? "holds: " : "fails: ") + fact);
        if (!ok) holds = false;
    }

    void requireArc(const ParameterTable& t, const std::string& a, const std::string& b, bool wanted = true) {
        const auto* arc = t.graph.findArc(a, b);
        std::string fact = tableName(t) + " arc " + a + "-" + b;
        fact += arc ? " present (p=" + fmt(arc->p) + ")" : " absent";
        require((arc != nullptr) == wanted, fact + (wanted ? "" : ", none expected"));
    }

    void requireNoArcs(const ParameterTable& t) {
        require(t.graph.arcs.empty(), tableName(t) + " has " + std::to_string(t.graph.arcs.size()) +
                                          " arcs (anovaP=" + fmt(t.graph.anovaP) + "), none expected");
    }

    HypothesisVerdict finish() {
        if (missing) {
            out.verdict = Verdict::Inconclusive;
        } else {
            out.verdict = holds ? Verdict::Accepted : Verdict::Rejected;
        }
        return out;
    }
};

HypothesisVerdict evalType(const PerformanceReport& report) {
    Rule rule{report, {HypothesisId::Type, Verdict::Inconclusive, {}}};
    const auto* rt = rule.table(kOverallScope, Parameter::Type, Measure::RT);
    if (!rt) return rule.finish();
    const double red = rule.mean(*rt, kRed), color = rule.mean(*rt, kColor), shape = rule.mean(*rt, kShape),
                 conj = rule.mean(*rt, kConj);
    if (rule.missing) return rule.finish();
    rule.require(red < color, "RT red " + fmt(red) + " < color " + fmt(color));
    rule.require(red < shape, "RT red " + fmt(red) + " < shape " + fmt(shape));
    rule.require(color < conj, "RT color " + fmt(color) + " < conjunction " + fmt(conj));
    rule.require(shape < conj, "RT shape " + fmt(shape) + " < conjunction " + fmt(conj));
    rule.requireArc(*rt, kRed, kColor);
    rule.requireArc(*rt, kRed, kShape);
    rule.requireArc(*rt, kColor, kConj);
    rule.requireArc(*rt, kShape, kConj);
    return rule.finish();
}

HypothesisVerdict evalConj(const PerformanceReport& report) {
    Rule rule{report, {HypothesisId::Conj, Verdict::Inconclusive, {}}};
    for (auto m : {Measure::ER, Measure::RT}) {
        const auto* t = rule.table(kOverallScope, Parameter::Type, m);
        if (!t) continue;
        const double conj = rule.mean(*t, kConj);
        for (const auto& other : {kColor, kShape, kRed}) {
            const double v = rule.mean(*t, other);
            if (rule.missing) return rule.finish();
            rule.require(conj > v, std::string(nameOf(m)) + " conjunction " + fmt(conj) + " > " + other + " " + fmt(v));
            rule.requireArc(*t, kConj, other);
        }
    }
    for (auto m : {Measure::ER, Measure::RT}) {
        const auto* t = rule.table(kConj, Parameter::NColors, m);
        if (!t) continue;
        for (const auto& arc : t->graph.arcs) {
            rule.require(arc.a == "2" || arc.b == "2",
                         tableName(*t) + " arc " + arc.a + "-" + arc.b + " involves 2 colors");
        }
        if (t->graph.arcs.empty()) rule.out.evidence.push_back(tableName(*t) + " has no arcs");
    }
    return rule.finish();
}

HypothesisVerdict evalRed(const PerformanceReport& report) {
    Rule rule{report, {HypothesisId::Red, Verdict::Inconclusive, {}}};
    if (const auto* rt = rule.table(kOverallScope, Parameter::Type, Measure::RT)) {
        const double red = rule.mean(*rt, kRed);
        for (const auto& other : {kColor, kShape, kConj}) {
            const double v = rule.mean(*rt, other);
            if (rule.missing) return rule.finish();
            rule.require(red < v, "RT red " + fmt(red) + " < " + other + " " + fmt(v));
            rule.requireArc(*rt, kRed, other);
        }
    }
    for (auto p : {Parameter::NColors, Parameter::NShapes}) {
        const auto* t = rule.table(kRed, p, Measure::ER);
        if (!t) continue;
        bool allZero = true;
        for (const auto& r : t->rows) {
            if (r.n > 0 && r.mean != 0.0) allZero = false;
        }
        if (allZero) {
            rule.require(true, tableName(*t) + " is zero everywhere");
        } else {
            rule.requireNoArcs(*t);
        }
    }
    if (const auto* t = rule.table(kRed, Parameter::NShapes, Measure::RT)) rule.requireNoArcs(*t);
    return rule.finish();
}

HypothesisVerdict evalColor(const PerformanceReport& report) {
    Rule rule{report, {HypothesisId::Color, Verdict::Inconclusive, {}}};
    const auto* er = rule.table(kColor, Parameter::NColors, Measure::ER);
    const auto* rt = rule.table(kColor, Parameter::NColors, Measure::RT);
    const auto* shapeEr = rule.table(kShape, Parameter::NColors, Measure::ER);
    const auto* shapeRt = rule.table(kShape, Parameter::NColors, Measure::RT);
    if (rule.missing) return rule.finish();
    const std::size_t arcs = er->graph.arcs.size() + rt->graph.arcs.size();
    rule.require(arcs > 0, "nColors arcs within color type: " + std::to_string(arcs));
    rule.requireNoArcs(*shapeEr);
    rule.requireNoArcs(*shapeRt);
    return rule.finish();
}

HypothesisVerdict evalShape(const PerformanceReport& report) {
    Rule rule{report, {HypothesisId::Shape, Verdict::Inconclusive, {}}};
    const auto* er = rule.table(kShape, Parameter::NShapes, Measure::ER);
    const auto* rt = rule.table(kShape, Parameter::NShapes, Measure::RT);
    const auto* colorEr = rule.table(kColor, Parameter::NShapes, Measure::ER);
    const auto* colorRt = rule.table(kColor, Parameter::NShapes, Measure::RT);
    if (rule.missing) return rule.finish();
    rule.requireNoArcs(*er);
    rule.requireNoArcs(*rt);

    // When shape is irrelevant, 5 shapes should be significantly easier than
    // every other value in at least one measure.
    bool easier = false;
    for (const auto* t : {colorEr, colorRt}) {
        const auto* five = t->row("5");
        if (!five || five->n == 0) continue;
        bool all = t->rows.size() > 1;
        for (const auto& r : t->rows) {
            if (r.label == "5" || r.n == 0) continue;
            if (!(five->mean < r.mean && t->graph.hasArc("5", r.label))) all = false;
        }
        if (all) easier = true;
    }
    rule.require(easier, "5 shapes significantly easier within color type");
    return rule.finish();
}

}  // namespace

std::string_view nameOf(HypothesisId id) {
    switch (id) {
    case HypothesisId::Type: return "H_type";
    case HypothesisId::Conj: return "H_conj";
    case HypothesisId::Red: return "H_red";
    case HypothesisId::Color: return "H_color";
    case HypothesisId::Shape: return "H_shape";
    }
    return "?";
}

std::string_view nameOf(Verdict verdict) {
    switch (verdict) {
    case Verdict::Accepted: return "accepted";
    case Verdict::Rejected: return "rejected";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<HypothesisVerdict> evaluateHypotheses(const PerformanceReport& report) {
    return {evalType(report), evalConj(report), evalRed(report), evalColor(report), evalShape(report)};
}

nlohmann::json toJson(const std::vector<HypothesisVerdict>& verdicts) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : verdicts) {
        out.push_back({{"id", nameOf(v.id)}, {"verdict", nameOf(v.verdict)}, {"evidence", v.evidence}});
    }
    return out;
}

}  // namespace olab::stats
