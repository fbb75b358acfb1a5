#include "olab/figures/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "olab/core/model.hpp"

namespace olab::figures {

namespace {

// Type colors for stacked charts (categorical, colorblind friendly).
constexpr std::array<const char*, 4> kTypeFill{"#4c72b0", "#dd8452", "#55a868", "#c44e52"};

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
}

std::string document(int width, int height, const std::string& body) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
           "\" font-family=\"sans-serif\" font-size=\"10\">\n" + body + "</svg>\n";
}

std::string text(double x, double y, std::string_view s, std::string_view anchor = "middle", std::string_view extra = "") {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + std::string(anchor) + "\"" +
           (extra.empty() ? "" : " " + std::string(extra)) + ">" + escape(s) + "</text>\n";
}

struct Frame {
    double left, top, width, height;
};

Frame plotFrame(const ChartOptions& o) { return {36.0, 28.0, o.width - 46.0, o.height - 64.0}; }

std::string axes(const Frame& f, double maxValue) {
    std::string s = "<line x1=\"" + fmt(f.left) + "\" y1=\"" + fmt(f.top + f.height) + "\" x2=\"" + fmt(f.left + f.width) +
                    "\" y2=\"" + fmt(f.top + f.height) + "\" stroke=\"#333\"/>\n";
    s += "<line x1=\"" + fmt(f.left) + "\" y1=\"" + fmt(f.top) + "\" x2=\"" + fmt(f.left) + "\" y2=\"" +
         fmt(f.top + f.height) + "\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = maxValue * i / 4.0;
        const double y = f.top + f.height - f.height * i / 4.0;
        s += text(f.left - 3, y + 3, fmt(std::round(v * 1000) / 1000), "end");
    }
    return s;
}

}  // namespace

std::string barChartGroup(const stats::ParameterTable& table, const ChartOptions& options, double x, double y) {
    const Frame f = plotFrame(options);
    const bool er = table.measure == stats::Measure::ER;
    double maxValue = er ? 1.0 : 0.0;
    for (const auto& r : table.rows) {
        if (r.n > 0) maxValue = std::max(maxValue, r.mean + r.sd);
    }
    if (maxValue <= 0.0) maxValue = 1.0;

    std::string body;
    const std::string title = options.title.empty() ? table.scope + " / " + std::string(stats::nameOf(table.parameter)) +
                                                          " / " + std::string(stats::nameOf(table.measure))
                                                    : options.title;
    body += text(options.width / 2.0, 12, title, "middle", "font-weight=\"bold\"");
    body += axes(f, maxValue);

    const auto n = static_cast<double>(std::max<std::size_t>(table.rows.size(), 1));
    const double slot = f.width / n;
    std::map<std::string, double> centers;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const double cx = f.left + slot * (static_cast<double>(i) + 0.5);
        centers[r.label] = cx;
        body += text(cx, f.top + f.height + 12, r.label, "middle", "class=\"label\"");
        if (r.n == 0 || std::isnan(r.mean)) continue;
        const double h = f.height * r.mean / maxValue;
        const double bw = slot * 0.6;
        body += "<rect class=\"bar\" data-label=\"" + escape(r.label) + "\" data-mean=\"" + fmt(r.mean) + "\" x=\"" +
                fmt(cx - bw / 2) + "\" y=\"" + fmt(f.top + f.height - h) + "\" width=\"" + fmt(bw) + "\" height=\"" +
                fmt(h) + "\" fill=\"#6b8fb5\"/>\n";
        if (r.sd > 0.0) {
            const double y0 = f.top + f.height - f.height * std::max(0.0, r.mean - r.sd) / maxValue;
            const double y1 = f.top + f.height - f.height * (r.mean + r.sd) / maxValue;
            body += "<line class=\"sd\" x1=\"" + fmt(cx) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(cx) + "\" y2=\"" + fmt(y1) +
                    "\" stroke=\"#222\"/>\n";
        }
    }
    // Arcs hang below the value labels so they never cover the bars.
    const double base = f.top + f.height + 16;
    for (const auto& arc : table.graph.arcs) {
        const auto a = centers.find(arc.a), b = centers.find(arc.b);
        if (a == centers.end() || b == centers.end()) continue;
        const double depth = 6 + 3 * std::abs(b->second - a->second) / slot;
        body += "<path class=\"arc\" data-from=\"" + escape(arc.a) + "\" data-to=\"" + escape(arc.b) + "\" data-p=\"" +
                fmt(arc.p) + "\" d=\"M " + fmt(a->second) + " " + fmt(base) + " Q " + fmt((a->second + b->second) / 2) +
                " " + fmt(base + 2 * depth) + " " + fmt(b->second) + " " + fmt(base) +
                "\" fill=\"none\" stroke=\"#b03030\" stroke-width=\"0.8\"/>\n";
    }
    const std::string opacity = table.graph.significant() ? "1" : fmt(options.fadedOpacity);
    return "<g class=\"chart\" data-scope=\"" + escape(table.scope) + "\" data-parameter=\"" +
           std::string(stats::nameOf(table.parameter)) + "\" data-measure=\"" + std::string(stats::nameOf(table.measure)) +
           "\" data-significant=\"" + (table.graph.significant() ? "true" : "false") + "\" opacity=\"" + opacity +
           "\" transform=\"translate(" + fmt(x) + "," + fmt(y) + ")\">\n" + body + "</g>\n";
}

std::string barChartSvg(const stats::ParameterTable& table, const ChartOptions& options) {
    return document(options.width, options.height, barChartGroup(table, options));
}

std::string panelGridSvg(const stats::PerformanceReport& report, stats::Measure measure, const std::vector<std::string>& scopes,
                         const std::vector<stats::Parameter>& parameters, const ChartOptions& cell) {
    const int labelWidth = 24;
    std::string body;
    for (std::size_t r = 0; r < scopes.size(); ++r) {
        const double y = static_cast<double>(r) * cell.height;
        body += "<text x=\"12\" y=\"" + fmt(y + cell.height / 2.0) + "\" text-anchor=\"middle\" transform=\"rotate(-90 12 " +
                fmt(y + cell.height / 2.0) + ")\">" + escape(scopes[r]) + "</text>\n";
        for (std::size_t c = 0; c < parameters.size(); ++c) {
            const auto* t = report.find(scopes[r], parameters[c], measure);
            if (!t) continue;
            body += barChartGroup(*t, cell, labelWidth + static_cast<double>(c) * cell.width, y);
        }
    }
    return document(labelWidth + static_cast<int>(parameters.size()) * cell.width, static_cast<int>(scopes.size()) * cell.height,
                    body);
}

std::string difficultyPanelSvg(const stats::PerformanceReport& report, stats::Measure measure) {
    std::vector<std::string> scopes{stats::kOverallScope};
    for (auto t : kAllTypes) scopes.emplace_back(nameOf(t));
    return panelGridSvg(report, measure, scopes,
                        {stats::Parameter::NColors, stats::Parameter::NShapes, stats::Parameter::OutlierColor});
}

std::string ootStackedSvg(const stats::PerformanceReport& report, stats::Parameter parameter, const ChartOptions& options) {
    // Stack the per-type tables; fall back to the overall table for the type
    // parameter, which has no per-type split.
    std::vector<std::string> labels;
    std::map<std::string, std::array<std::size_t, 4>> stacks;
    auto addLabel = [&](const std::string& l) {
        if (!stacks.count(l)) {
            labels.push_back(l);
            stacks[l] = {};
        }
    };
    if (const auto it = std::find_if(report.oot.begin(), report.oot.end(),
                                     [&](const stats::OotTable& t) { return t.scope == stats::kOverallScope && t.parameter == parameter; });
        it != report.oot.end()) {
        for (const auto& [label, count] : it->counts) addLabel(label);
    }
    bool perType = false;
    for (std::size_t ti = 0; ti < kAllTypes.size(); ++ti) {
        const std::string scope(nameOf(kAllTypes[ti]));
        for (const auto& t : report.oot) {
            if (t.scope != scope || t.parameter != parameter) continue;
            perType = true;
            for (const auto& [label, count] : t.counts) {
                addLabel(label);
                stacks[label][ti] += count;
            }
        }
    }
    if (!perType && parameter == stats::Parameter::Type) {
        for (const auto& t : report.oot) {
            if (t.scope != stats::kOverallScope || t.parameter != parameter) continue;
            for (const auto& [label, count] : t.counts) {
                const auto type = outlierTypeFromString(label);
                const auto ti = static_cast<std::size_t>(std::find(kAllTypes.begin(), kAllTypes.end(), type) - kAllTypes.begin());
                stacks[label][ti] += count;
            }
        }
    }

    const Frame f = plotFrame(options);
    std::size_t maxTotal = 1;
    for (const auto& [label, s] : stacks) maxTotal = std::max(maxTotal, s[0] + s[1] + s[2] + s[3]);
    std::string body = text(options.width / 2.0, 12,
                            options.title.empty() ? "OOT by " + std::string(stats::nameOf(parameter)) : options.title, "middle",
                            "font-weight=\"bold\"");
    body += axes(f, static_cast<double>(maxTotal));
    const double slot = f.width / static_cast<double>(std::max<std::size_t>(labels.size(), 1));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double cx = f.left + slot * (static_cast<double>(i) + 0.5);
        body += text(cx, f.top + f.height + 12, labels[i]);
        double top = f.top + f.height;
        for (std::size_t ti = 0; ti < 4; ++ti) {
            const auto count = stacks[labels[i]][ti];
            if (count == 0) continue;
            const double h = f.height * static_cast<double>(count) / static_cast<double>(maxTotal);
            top -= h;
            body += "<rect class=\"oot\" data-label=\"" + escape(labels[i]) + "\" data-type=\"" +
                    std::string(nameOf(kAllTypes[ti])) + "\" data-count=\"" + std::to_string(count) + "\" x=\"" +
                    fmt(cx - slot * 0.3) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(slot * 0.6) + "\" height=\"" + fmt(h) +
                    "\" fill=\"" + kTypeFill[ti] + "\"/>\n";
        }
    }
    for (std::size_t ti = 0; ti < 4; ++ti) {
        const double lx = f.left + static_cast<double>(ti) * f.width / 4.0;
        body += "<rect x=\"" + fmt(lx) + "\" y=\"" + fmt(options.height - 14.0) + "\" width=\"8\" height=\"8\" fill=\"" +
                kTypeFill[ti] + "\"/>\n";
        body += text(lx + 11, options.height - 7.0, nameOf(kAllTypes[ti]), "start");
    }
    return document(options.width, options.height, "<g class=\"oot-chart\">\n" + body + "</g>\n");
}

std::string sensitivitySvg(const std::vector<stats::SensitivityCurve>& curves, const ChartOptions& options) {
    const Frame f = plotFrame(options);
    std::string body = text(options.width / 2.0, 12, options.title.empty() ? "Subset sensitivity" : options.title, "middle",
                            "font-weight=\"bold\"");
    // Rho runs over [-1, 1]; the axis shows [0, 1] and negatives clip to 0.
    body += axes(f, 1.0);
    for (int pct = 10; pct <= 100; pct += 30) {
        body += text(f.left + f.width * pct / 100.0, f.top + f.height + 12, std::to_string(pct) + "%");
    }
    static constexpr std::array<const char*, 6> kStroke{"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"};
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        std::string points;
        for (const auto& p : c.points) {
            const double px = f.left + f.width * p.fraction;
            const double py = f.top + f.height - f.height * std::clamp(p.meanRho, 0.0, 1.0);
            points += fmt(px) + "," + fmt(py) + " ";
        }
        const std::string name = std::string(stats::nameOf(c.parameter)) + " " + std::string(stats::nameOf(c.measure));
        body += "<polyline class=\"curve\" data-name=\"" + escape(name) + "\" points=\"" + points + "\" fill=\"none\" stroke=\"" +
                kStroke[i % kStroke.size()] + "\"/>\n";
        body += text(f.left + f.width + 2, f.top + 10.0 * static_cast<double>(i + 1), name, "end",
                     "fill=\"" + std::string(kStroke[i % kStroke.size()]) + "\"");
    }
    return document(options.width, options.height, body);
}

std::vector<std::filesystem::path> writeFigureSet(const std::filesystem::path& dir, const stats::PerformanceReport* difficulty,
                                                  const stats::PerformanceReport* performance,
                                                  const std::vector<stats::SensitivityCurve>& sensitivity) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string& name, const std::string& svg) {
        const auto file = dir / name;
        std::ofstream out(file);
        out << svg;
        if (!out) throw std::runtime_error("cannot write " + file.string());
        written.push_back(file);
    };
    if (difficulty) {
        put("difficulty_panels_er.svg", difficultyPanelSvg(*difficulty, stats::Measure::ER));
        if (const auto* t = difficulty->find(stats::kOverallScope, stats::Parameter::Type, stats::Measure::ER)) {
            put("difficulty_type_er.svg", barChartSvg(*t));
        }
    }
    if (performance) {
        for (auto measure : {stats::Measure::ER, stats::Measure::RT}) {
            const std::string m(stats::nameOf(measure));
            if (const auto* t = performance->find(stats::kOverallScope, stats::Parameter::Type, measure)) {
                put("study_type_" + m + ".svg", barChartSvg(*t));
            }
            put("study_panels_" + m + ".svg", difficultyPanelSvg(*performance, measure));
            if (const auto* t = performance->find(stats::kOverallScope, stats::Parameter::DiffStimuli, measure)) {
                put("study_diffstimuli_" + m + ".svg", barChartSvg(*t));
            }
        }
        for (auto p : {stats::Parameter::Type, stats::Parameter::NColors, stats::Parameter::NShapes}) {
            put("study_oot_" + std::string(stats::nameOf(p)) + ".svg", ootStackedSvg(*performance, p));
        }
    }
    if (!sensitivity.empty()) put("study_sensitivity.svg", sensitivitySvg(sensitivity));
    return written;
}

}  // namespace olab::figures
