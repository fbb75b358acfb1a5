#include "olab/stats/sensitivity.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "olab/core/log.hpp"
#include "olab/core/random.hpp"
#include "olab/stats/rank_tests.hpp"

namespace olab::stats {

namespace {

using MeanTable = std::map<int, std::pair<double, std::size_t>>;

MeanTable perValueSums(const std::vector<const Observation*>& records, Parameter parameter, Measure measure) {
    MeanTable table;
    for (const auto* o : records) {
        const auto v = measure == Measure::ER ? o->error : o->rtMs;
        if (!v) continue;
        auto& cell = table[parameterKey(parameter, o->config)];
        cell.first += *v;
        ++cell.second;
    }
    return table;
}

}  // namespace

std::vector<double> defaultSensitivityFractions() {
    std::vector<double> fractions;
    for (int pct = 10; pct <= 95; pct += 5) fractions.push_back(pct / 100.0);
    return fractions;
}

SensitivityCurve sensitivityAnalysis(const std::vector<Observation>& observations, Parameter parameter,
                                     Measure measure, std::uint64_t seed, const std::vector<double>& fractions,
                                     int samplings) {
    if (samplings < 1) throw std::invalid_argument("sensitivityAnalysis needs at least one sampling");
    std::map<std::string, std::vector<const Observation*>> bySubject;
    for (const auto& o : observations) bySubject[o.subject].push_back(&o);
    if (bySubject.size() < 3) throw std::invalid_argument("sensitivityAnalysis needs at least 3 subjects");

    std::vector<const Observation*> all;
    for (const auto& o : observations) all.push_back(&o);
    const auto full = perValueSums(all, parameter, measure);
    if (full.size() < 2) throw std::invalid_argument("sensitivityAnalysis needs at least 2 parameter values");

    std::vector<std::string> subjects;
    for (const auto& kv : bySubject) subjects.push_back(kv.first);

    SensitivityCurve curve;
    curve.parameter = parameter;
    curve.measure = measure;
    curve.subjectCount = subjects.size();

    for (double fraction : fractions) {
        const auto size = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(subjects.size()) + 1e-9));
        if (size < 1) {
            warn("sensitivity: fraction " + std::to_string(fraction) + " selects no subject, skipped");
            continue;
        }
        SensitivityPoint point;
        point.fraction = fraction;
        point.subsetSize = std::min(size, subjects.size());
        const auto pct = static_cast<std::uint64_t>(std::llround(fraction * 1000.0));
        for (int s = 0; s < samplings; ++s) {
            Engine rng(deriveSeed(seed, pct * 1000 + static_cast<std::uint64_t>(s)));
            auto order = subjects;
            shuffleInPlace(order, rng);
            std::vector<const Observation*> subset;
            for (std::size_t i = 0; i < point.subsetSize; ++i) {
                const auto& recs = bySubject[order[i]];
                subset.insert(subset.end(), recs.begin(), recs.end());
            }
            const auto part = perValueSums(subset, parameter, measure);
            std::vector<double> a, b;
            for (const auto& [key, cell] : part) {
                const auto& ref = full.at(key);
                a.push_back(cell.first / static_cast<double>(cell.second));
                b.push_back(ref.first / static_cast<double>(ref.second));
            }
            double rho = 0.0;
            if (a.size() >= 2) {
                rho = spearman(a, b);
            } else {
                warn("sensitivity: subset covers fewer than 2 values, rho defined as 0");
            }
            point.rhos.push_back(rho);
        }
        double sum = 0.0;
        for (double r : point.rhos) sum += r;
        point.meanRho = sum / static_cast<double>(point.rhos.size());
        curve.points.push_back(std::move(point));
    }
    return curve;
}

nlohmann::json toJson(const SensitivityCurve& curve) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : curve.points) {
        points.push_back({{"fraction", p.fraction}, {"subsetSize", p.subsetSize}, {"meanRho", p.meanRho}, {"rhos", p.rhos}});
    }
    return {{"parameter", nameOf(curve.parameter)},
            {"measure", nameOf(curve.measure)},
            {"subjectCount", curve.subjectCount},
            {"points", points}};
}

SensitivityCurve sensitivityFromJson(const nlohmann::json& j) {
    SensitivityCurve curve;
    curve.parameter = parameterFromString(j.at("parameter").get<std::string>());
    curve.measure = measureFromString(j.at("measure").get<std::string>());
    curve.subjectCount = j.at("subjectCount").get<std::size_t>();
    for (const auto& pj : j.at("points")) {
        SensitivityPoint p;
        p.fraction = pj.at("fraction").get<double>();
        p.subsetSize = pj.at("subsetSize").get<std::size_t>();
        p.meanRho = pj.at("meanRho").get<double>();
        p.rhos = pj.at("rhos").get<std::vector<double>>();
        curve.points.push_back(std::move(p));
    }
    return curve;
}

}  // namespace olab::stats
