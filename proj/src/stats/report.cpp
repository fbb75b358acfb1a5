#include "olab/stats/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace olab::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool inScope(const GridConfig& config, std::string_view scope) {
    return scope == kOverallScope || nameOf(config.type) == scope;
}

std::optional<double> measureValue(const Observation& o, Measure measure) {
    return measure == Measure::ER ? o.error : o.rtMs;
}

/// Keys the feasible design allows for `parameter` within `scope`.
std::set<int> domainKeys(Parameter parameter, std::string_view scope) {
    std::set<int> keys;
    for (const auto& t : feasibleTriples()) {
        if (scope != kOverallScope && nameOf(t.type) != scope) continue;
        GridConfig c;
        c.type = t.type;
        c.nColors = t.nColors;
        c.nShapes = t.nShapes;
        switch (parameter) {
        case Parameter::OutlierColor:
            for (int i = 0; i < kNumColors; ++i) keys.insert(i);
            break;
        case Parameter::OutlierShape:
            for (int i = 0; i < kNumShapes; ++i) keys.insert(i);
            break;
        default:
            keys.insert(parameterKey(parameter, c));
        }
    }
    return keys;
}

ValueSummary summarize(std::string label, int key, const std::vector<double>& values) {
    ValueSummary s;
    s.label = std::move(label);
    s.key = key;
    s.n = values.size();
    if (values.empty()) {
        s.mean = kNaN;
        s.sd = kNaN;
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

nlohmann::json numberOrNull(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }
double numberFrom(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

std::string_view nameOf(Parameter parameter) {
    switch (parameter) {
    case Parameter::Type: return "type";
    case Parameter::NColors: return "nColors";
    case Parameter::NShapes: return "nShapes";
    case Parameter::OutlierColor: return "outlierColor";
    case Parameter::OutlierShape: return "outlierShape";
    case Parameter::DiffStimuli: return "diffStimuli";
    }
    throw std::invalid_argument("bad parameter");
}

Parameter parameterFromString(std::string_view name) {
    for (auto p : kAllParameters) {
        if (nameOf(p) == name) return p;
    }
    throw std::invalid_argument("unknown parameter: " + std::string(name));
}

int parameterKey(Parameter parameter, const GridConfig& config) {
    switch (parameter) {
    case Parameter::Type: return static_cast<int>(config.type);
    case Parameter::NColors: return config.nColors;
    case Parameter::NShapes: return config.nShapes;
    case Parameter::OutlierColor: return config.outlierColor.index();
    case Parameter::OutlierShape: return config.outlierShape.index();
    case Parameter::DiffStimuli: return diffStimuliClosedForm(config.type, config.nColors, config.nShapes);
    }
    throw std::invalid_argument("bad parameter");
}

std::string parameterLabel(Parameter parameter, int key) {
    switch (parameter) {
    case Parameter::Type: return std::string(nameOf(static_cast<OutlierType>(key)));
    case Parameter::OutlierColor: return std::string(ColorId(key).hex());
    case Parameter::OutlierShape: return std::string(ShapeId(key).name());
    default: return std::to_string(key);
    }
}

const ValueSummary* ParameterTable::row(std::string_view label) const {
    for (const auto& r : rows) {
        if (r.label == label) return &r;
    }
    return nullptr;
}

const ParameterTable* PerformanceReport::find(std::string_view scope, Parameter parameter, Measure measure) const {
    for (const auto& t : tables) {
        if (t.scope == scope && t.parameter == parameter && t.measure == measure) return &t;
    }
    return nullptr;
}

double PerformanceReport::overallMean(Measure measure) const {
    const double sum = measure == Measure::ER ? erSum : rtSum;
    const auto n = scoredCount(measure);
    return n == 0 ? kNaN : sum / static_cast<double>(n);
}

std::size_t PerformanceReport::scoredCount(Measure measure) const {
    return measure == Measure::ER ? erCount : rtCount;
}

std::vector<LabeledSample> samplesByValue(const std::vector<Observation>& observations, std::string_view scope,
                                          Parameter parameter, Measure measure) {
    std::map<int, std::vector<double>> byKey;
    for (const auto& o : observations) {
        if (!inScope(o.config, scope)) continue;
        const auto v = measureValue(o, measure);
        if (!v) continue;
        byKey[parameterKey(parameter, o.config)].push_back(*v);
    }
    std::vector<LabeledSample> samples;
    for (auto& [key, values] : byKey) samples.push_back({parameterLabel(parameter, key), std::move(values)});
    return samples;
}

namespace {

ParameterTable buildTable(const std::vector<Observation>& observations, const std::string& scope,
                          Parameter parameter, Measure measure, double alpha, bool fullDomain) {
    ParameterTable table;
    table.scope = scope;
    table.parameter = parameter;
    table.measure = measure;

    std::map<int, std::vector<double>> byKey;
    for (const auto& o : observations) {
        if (!inScope(o.config, scope)) continue;
        const auto v = measureValue(o, measure);
        if (!v) continue;
        byKey[parameterKey(parameter, o.config)].push_back(*v);
    }
    std::set<int> keys;
    for (const auto& kv : byKey) keys.insert(kv.first);
    const auto domain = domainKeys(parameter, scope);
    if (fullDomain) keys.insert(domain.begin(), domain.end());
    for (int k : domain) {
        if (!byKey.count(k)) table.coverageGaps.push_back(parameterLabel(parameter, k));
    }

    std::vector<LabeledSample> samples;
    for (int k : keys) {
        const auto it = byKey.find(k);
        const std::vector<double> empty;
        const auto& values = it == byKey.end() ? empty : it->second;
        table.rows.push_back(summarize(parameterLabel(parameter, k), k, values));
        samples.push_back({parameterLabel(parameter, k), values});
    }
    table.graph = significanceArcs(std::string(nameOf(parameter)), measure, samples, alpha);
    return table;
}

OotTable buildOotTable(const std::vector<Observation>& observations, const std::string& scope, Parameter parameter) {
    OotTable table;
    table.scope = scope;
    table.parameter = parameter;
    std::map<int, std::size_t> counts;
    for (int k : domainKeys(parameter, scope)) counts[k] = 0;
    for (const auto& o : observations) {
        if (o.oot && inScope(o.config, scope)) ++counts[parameterKey(parameter, o.config)];
    }
    for (const auto& [k, n] : counts) table.counts.emplace_back(parameterLabel(parameter, k), n);
    return table;
}

}  // namespace

PerformanceReport buildPerformanceReport(const std::vector<Observation>& observations, const ReportOptions& options) {
    PerformanceReport report;
    report.observationCount = observations.size();
    report.alphaOverall = options.alphaOverall;
    report.alphaPerType = options.alphaPerType;
    for (const auto& o : observations) {
        if (o.oot) ++report.ootCount;
        if (o.error) {
            report.erSum += *o.error;
            ++report.erCount;
        }
        if (o.rtMs) {
            report.rtSum += *o.rtMs;
            ++report.rtCount;
        }
    }

    std::vector<std::string> scopes{kOverallScope};
    if (options.perType) {
        for (auto t : kAllTypes) scopes.emplace_back(nameOf(t));
    }
    for (const auto& scope : scopes) {
        const bool overall = scope == kOverallScope;
        const double alpha = overall ? options.alphaOverall : options.alphaPerType;
        for (auto parameter : options.parameters) {
            if (!overall && parameter == Parameter::Type) continue;
            for (auto measure : options.measures) {
                report.tables.push_back(
                    buildTable(observations, scope, parameter, measure, alpha, options.fullDomain));
            }
        }
        for (auto parameter : {Parameter::Type, Parameter::NColors, Parameter::NShapes}) {
            if (!overall && parameter == Parameter::Type) continue;
            report.oot.push_back(buildOotTable(observations, scope, parameter));
        }
    }
    return report;
}

nlohmann::json toJson(const PerformanceReport& report) {
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : report.tables) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : t.rows) {
            rows.push_back({{"label", r.label},
                            {"key", r.key},
                            {"n", r.n},
                            {"mean", numberOrNull(r.mean)},
                            {"sd", numberOrNull(r.sd)}});
        }
        tables.push_back({{"scope", t.scope},
                          {"parameter", nameOf(t.parameter)},
                          {"measure", nameOf(t.measure)},
                          {"rows", rows},
                          {"graph", toJson(t.graph)},
                          {"coverageGaps", t.coverageGaps}});
    }
    nlohmann::json oot = nlohmann::json::array();
    for (const auto& t : report.oot) {
        nlohmann::json counts = nlohmann::json::array();
        for (const auto& [label, n] : t.counts) counts.push_back({{"label", label}, {"count", n}});
        oot.push_back({{"scope", t.scope}, {"parameter", nameOf(t.parameter)}, {"counts", counts}});
    }
    return {{"observationCount", report.observationCount},
            {"ootCount", report.ootCount},
            {"alphaOverall", report.alphaOverall},
            {"alphaPerType", report.alphaPerType},
            {"totals",
             {{"erSum", report.erSum},
              {"erCount", report.erCount},
              {"rtSum", report.rtSum},
              {"rtCount", report.rtCount}}},
            {"tables", tables},
            {"oot", oot}};
}

PerformanceReport reportFromJson(const nlohmann::json& j) {
    PerformanceReport report;
    report.observationCount = j.at("observationCount").get<std::size_t>();
    report.ootCount = j.at("ootCount").get<std::size_t>();
    report.alphaOverall = j.at("alphaOverall").get<double>();
    report.alphaPerType = j.at("alphaPerType").get<double>();
    const auto& totals = j.at("totals");
    report.erSum = totals.at("erSum").get<double>();
    report.erCount = totals.at("erCount").get<std::size_t>();
    report.rtSum = totals.at("rtSum").get<double>();
    report.rtCount = totals.at("rtCount").get<std::size_t>();
    for (const auto& tj : j.at("tables")) {
        ParameterTable t;
        t.scope = tj.at("scope").get<std::string>();
        t.parameter = parameterFromString(tj.at("parameter").get<std::string>());
        t.measure = measureFromString(tj.at("measure").get<std::string>());
        for (const auto& rj : tj.at("rows")) {
            ValueSummary r;
            r.label = rj.at("label").get<std::string>();
            r.key = rj.at("key").get<int>();
            r.n = rj.at("n").get<std::size_t>();
            r.mean = numberFrom(rj.at("mean"));
            r.sd = numberFrom(rj.at("sd"));
            t.rows.push_back(std::move(r));
        }
        t.graph = graphFromJson(tj.at("graph"));
        t.coverageGaps = tj.at("coverageGaps").get<std::vector<std::string>>();
        report.tables.push_back(std::move(t));
    }
    for (const auto& oj : j.at("oot")) {
        OotTable t;
        t.scope = oj.at("scope").get<std::string>();
        t.parameter = parameterFromString(oj.at("parameter").get<std::string>());
        for (const auto& c : oj.at("counts")) {
            t.counts.emplace_back(c.at("label").get<std::string>(), c.at("count").get<std::size_t>());
        }
        report.oot.push_back(std::move(t));
    }
    return report;
}

}  // namespace olab::stats
