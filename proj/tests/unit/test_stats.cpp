#include <algorithm>
#include <cmath>
#include <numeric>

#include "olab/core/log.hpp"
#include "olab/core/random.hpp"
#include "olab/stats/hypotheses.hpp"
#include "olab/stats/rank_tests.hpp"
#include "olab/stats/report.hpp"
#include "olab/stats/sensitivity.hpp"
#include "olab/stats/significance.hpp"
#include "test_support.hpp"

using namespace olab;
using namespace olab::stats;

namespace {

/// Captures warnings for the lifetime of the object.
struct WarningCapture {
    std::vector<std::string> messages;
    WarningSink previous;
    WarningCapture() {
        previous = setWarningSink([this](std::string_view m) { messages.emplace_back(m); });
    }
    ~WarningCapture() { setWarningSink(previous); }
};

/// Two-sided p by enumerating every assignment of the pooled mid-ranks to
/// the first sample.
double bruteForceRankSumP(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = averageRanks(pooled);
    const std::size_t n = pooled.size(), n1 = a.size();
    double observed = 0.0;
    for (std::size_t i = 0; i < n1; ++i) observed += ranks[i];
    const double center = static_cast<double>(n1) * static_cast<double>(n + 1) / 2.0;
    std::vector<int> pick(n, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n1), 1);
    std::sort(pick.begin(), pick.end());
    std::size_t total = 0, extreme = 0;
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pick[i]) s += ranks[i];
        }
        ++total;
        if (std::abs(s - center) >= std::abs(observed - center) - 1e-9) ++extreme;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
}

std::size_t arrangementCount(std::size_t n1, std::size_t n2) {
    std::vector<int> pick(n1 + n2, 0);
    std::fill(pick.end() - static_cast<std::ptrdiff_t>(n1), pick.end(), 1);
    std::size_t total = 0;
    do ++total;
    while (std::next_permutation(pick.begin(), pick.end()));
    return total;
}

GridConfig configOf(OutlierType type, int c, int s) {
    GridConfig g;
    g.type = type;
    g.nColors = c;
    g.nShapes = s;
    return g;
}

}  // namespace

TEST_CASE("averageRanks assigns mid-ranks to ties") {
    const std::vector<double> v{10, 20, 20, 5, 20};
    const auto r = averageRanks(v);
    CHECK(r == std::vector<double>{2, 4, 4, 1, 4});
    CHECK(tieTerm(v) == doctest::Approx(24.0));
}

TEST_CASE("kruskalWallis trivial cases and errors") {
    auto same = kruskalWallis({{1, 2, 3}, {1, 2, 3}});
    CHECK(same.h == doctest::Approx(0.0));
    CHECK(same.p == doctest::Approx(1.0));
    auto apart = kruskalWallis({{1, 2, 3}, {100, 101, 102}});
    CHECK(apart.p < 0.05);
    CHECK(apart.df == 1);
    auto constant = kruskalWallis({{4, 4}, {4, 4, 4}});
    CHECK(constant.h == 0.0);
    CHECK(constant.p == 1.0);
    CHECK_THROWS_AS(kruskalWallis({{1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(kruskalWallis({{1, 2}, {}}), std::invalid_argument);
}

TEST_CASE("kruskalWallis matches the hand-ranked 15-value fixture") {
    // Pooled ranks, ties averaged.
    // Sorted: 1.0(1) 2.1,2.1(2.5) 2.2(4) 3.0(5) 3.4x3(7) 4.4(9) 5.0x2(10.5)
    //         6.2(12) 7.1(13) 8.3(14) 9.0(15)
    //   R1 = 2.5+7+7+10.5+12 = 39, R2 = 9+10.5+13+14+15 = 61.5, R3 = 1+2.5+4+5+7 = 19.5
    //   H0 = 12/(15*16)*(39^2+61.5^2+19.5^2)/5 - 48 = 8.835
    //   ties (2.1, 3.4, 5.0): 6 + 24 + 6 = 36, C = 1 - 36/3360
    //   H = 8.835 / C = 8.93068592057763
    const auto r = kruskalWallis({{2.1, 3.4, 3.4, 5.0, 6.2}, {4.4, 5.0, 7.1, 8.3, 9.0}, {1.0, 2.1, 2.2, 3.0, 3.4}});
    CHECK(r.h == doctest::Approx(8.93068592057763).epsilon(1e-9));
    CHECK(r.p == doctest::Approx(0.0115007507827339).epsilon(1e-9));
    CHECK(r.df == 2);
}

TEST_CASE("chiSquareSurvival reference points") {
    CHECK(chiSquareSurvival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chiSquareSurvival(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chiSquareSurvival(0.0, 3) == 1.0);
}

TEST_CASE("wilcoxonRankSum trivial cases") {
    const std::vector<double> a{1, 2, 3, 4}, b{1, 2, 3, 4};
    const auto same = wilcoxonRankSum(a, b);
    CHECK(same.statistic == doctest::Approx(same.expected));
    CHECK(same.p == doctest::Approx(1.0));

    std::vector<double> lo(10), hi(10);
    std::iota(lo.begin(), lo.end(), 1.0);
    std::iota(hi.begin(), hi.end(), 101.0);
    CHECK(wilcoxonRankSum(lo, hi).p < 0.001);

    const std::vector<double> flat{3, 3, 3};
    CHECK(wilcoxonRankSum(flat, flat).p == 1.0);
    CHECK_THROWS_AS(wilcoxonRankSum(std::vector<double>{}, flat), std::invalid_argument);
}

TEST_CASE("exact rank-sum p matches the 126-arrangement enumeration") {
    CHECK(arrangementCount(4, 5) == 126);
    const std::vector<double> a{1.2, 3.3, 4.0, 7.5};
    const std::vector<double> b{2.0, 5.1, 6.6, 8.0, 9.9};
    const auto r = wilcoxonRankSum(a, b);
    CHECK(r.exact);
    CHECK(r.p == doctest::Approx(bruteForceRankSumP(a, b)).epsilon(1e-12));

    const std::vector<double> ta{1, 2, 2, 4}, tb{2, 4, 5, 5, 6};
    const auto t = wilcoxonRankSum(ta, tb);
    CHECK(t.exact);
    CHECK(t.p == doctest::Approx(bruteForceRankSumP(ta, tb)).epsilon(1e-12));
}

TEST_CASE("exact rank-sum p matches enumeration on random small samples") {
    Engine rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n1 = 1 + uniformBelow(rng, 6), n2 = 1 + uniformBelow(rng, 6);
        std::vector<double> a(n1), b(n2);
        for (auto& v : a) v = static_cast<double>(uniformBelow(rng, 8));
        for (auto& v : b) v = static_cast<double>(uniformBelow(rng, 8));
        const auto r = wilcoxonRankSum(a, b);
        std::vector<double> pooled(a);
        pooled.insert(pooled.end(), b.begin(), b.end());
        const bool constant = std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; });
        CHECK(r.p == doctest::Approx(constant ? 1.0 : bruteForceRankSumP(a, b)).epsilon(1e-12));
        CHECK(wilcoxonRankSum(b, a).p == doctest::Approx(r.p).epsilon(1e-12));
    }
}

TEST_CASE("normal-approximation rank-sum p matches the reference value") {
    // Reference: asymptotic two-sided Mann-Whitney with tie and continuity
    // correction, computed independently with scipy.
    std::vector<double> x, y;
    for (int i = 0; i < 25; ++i) x.push_back(i * 0.5);
    x.insert(x.end(), {3, 3, 4});
    for (int i = 0; i < 22; ++i) y.push_back(i * 0.5 + 2);
    y.insert(y.end(), {3, 4});
    const auto r = wilcoxonRankSum(x, y);
    CHECK_FALSE(r.exact);
    CHECK(r.p == doctest::Approx(0.211487106881593).epsilon(1e-9));
}

TEST_CASE("rank tests are invariant under monotone transforms") {
    Engine rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(8 + uniformBelow(rng, 20)), b(8 + uniformBelow(rng, 20));
        for (auto& v : a) v = uniformUnit(rng) * 5;
        for (auto& v : b) v = uniformUnit(rng) * 5 + 0.7;
        std::vector<double> ea(a.size()), eb(b.size());
        std::transform(a.begin(), a.end(), ea.begin(), [](double v) { return std::exp(v); });
        std::transform(b.begin(), b.end(), eb.begin(), [](double v) { return std::exp(v); });
        CHECK(wilcoxonRankSum(ea, eb).p == doctest::Approx(wilcoxonRankSum(a, b).p).epsilon(1e-12));
        CHECK(kruskalWallis({ea, eb}).p == doctest::Approx(kruskalWallis({a, b}).p).epsilon(1e-12));
        CHECK(spearman(a, ea) == doctest::Approx(1.0));
    }
}

TEST_CASE("spearman examples") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> rev{5, 4, 3, 2, 1};
    CHECK(spearman(a, a) == doctest::Approx(1.0));
    CHECK(spearman(a, rev) == doctest::Approx(-1.0));

    // Ranks a: 1 2.5 2.5 4 5 6.5 6.5 8; b: 2 1 3.5 3.5 7 6 5 8.
    // Pearson over those ranks: 35.75 / sqrt(41 * 41.5) = 0.866682583848347.
    const std::vector<double> ta{1, 2, 2, 3, 4, 5, 5, 6}, tb{2, 1, 3, 3, 6, 5, 4, 7};
    CHECK(spearman(ta, tb) == doctest::Approx(0.866682583848347).epsilon(1e-9));

    WarningCapture capture;
    const std::vector<double> flat{2, 2, 2, 2, 2};
    CHECK(spearman(a, flat) == 0.0);
    CHECK(capture.messages.size() == 1);
    CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
    CHECK_THROWS_AS(spearman(a, ta), std::invalid_argument);
}

TEST_CASE("significanceArcs gates pairwise tests on the omnibus test") {
    const std::vector<double> base{1, 2, 3, 4, 5, 6, 7, 8};
    auto none = significanceArcs("p", Measure::ER, {{"a", base}, {"b", base}, {"c", base}}, 0.05);
    CHECK(none.arcs.empty());
    CHECK_FALSE(none.significant());

    std::vector<double> shifted(base);
    for (auto& v : shifted) v += 100;
    auto g = significanceArcs("p", Measure::RT, {{"a", base}, {"b", base}, {"c", shifted}}, 0.05);
    CHECK(g.significant());
    REQUIRE(g.arcs.size() == 2);
    CHECK(g.hasArc("a", "c"));
    CHECK(g.hasArc("c", "b"));
    CHECK_FALSE(g.hasArc("a", "b"));
    for (const auto& arc : g.arcs) {
        CHECK(arc.p < 0.05);
        CHECK(arc.p == doctest::Approx(wilcoxonRankSum(base, shifted).p));
    }

    auto single = significanceArcs("p", Measure::ER, {{"a", base}, {"b", {}}}, 0.05);
    CHECK(single.anovaP == 1.0);
    CHECK(single.arcs.empty());
}

TEST_CASE("significanceArcs alpha threshold semantics") {
    // Omnibus p = 0.0305 and pairwise p = 0.0315 for this pair.
    std::vector<double> a(20), b(20);
    std::iota(a.begin(), a.end(), 0.0);
    for (int i = 0; i < 20; ++i) b[static_cast<std::size_t>(i)] = i + 4.5;
    auto loose = significanceArcs("p", Measure::RT, {{"a", a}, {"b", b}}, 0.05);
    auto strict = significanceArcs("p", Measure::RT, {{"a", a}, {"b", b}}, 0.025);
    REQUIRE(loose.arcs.size() == 1);
    CHECK(loose.arcs[0].p == doctest::Approx(0.0315).epsilon(0.01));
    CHECK(strict.arcs.empty());

    // Arcs at a stricter alpha are a subset of those at a looser one.
    Engine rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<LabeledSample> samples;
        for (int k = 0; k < 4; ++k) {
            LabeledSample s{std::to_string(k), {}};
            for (int i = 0; i < 25; ++i) s.values.push_back(uniformUnit(rng) + 0.15 * k);
            samples.push_back(s);
        }
        auto lo = significanceArcs("p", Measure::RT, samples, 0.025);
        auto hi = significanceArcs("p", Measure::RT, samples, 0.05);
        for (const auto& arc : lo.arcs) CHECK(hi.hasArc(arc.a, arc.b));
    }
}

TEST_CASE("significance graph JSON round trip") {
    std::vector<double> lo{1, 2, 3, 4, 5}, hi{10, 11, 12, 13, 14};
    auto g = significanceArcs("nColors", Measure::ER, {{"2", lo}, {"7", hi}}, 0.05);
    auto back = graphFromJson(toJson(g));
    CHECK(back.parameter == "nColors");
    CHECK(back.measure == Measure::ER);
    CHECK(back.arcs == g.arcs);
    CHECK(back.anovaP == doctest::Approx(g.anovaP));
}

namespace {

std::vector<Observation> mixedObservations() {
    std::vector<Observation> obs;
    Engine rng(5);
    for (const auto& t : feasibleTriples()) {
        for (int rep = 0; rep < 3; ++rep) {
            Observation o;
            o.subject = "s" + std::to_string(rep);
            o.config = configOf(t.type, t.nColors, t.nShapes);
            o.config.outlierColor = ColorId(static_cast<int>(uniformBelow(rng, 7)));
            o.config.outlierShape = ShapeId(static_cast<int>(uniformBelow(rng, 5)));
            if (uniformBelow(rng, 10) == 0) {
                o.oot = true;
            } else {
                o.error = static_cast<double>(uniformBelow(rng, 2));
                o.rtMs = 1000.0 + static_cast<double>(uniformBelow(rng, 5000));
            }
            obs.push_back(o);
        }
    }
    return obs;
}

}  // namespace

TEST_CASE("performance report recomposes the overall ER from per-type rows") {
    const auto obs = mixedObservations();
    const auto report = buildPerformanceReport(obs);
    const auto* byType = report.find(kOverallScope, Parameter::Type, Measure::ER);
    REQUIRE(byType != nullptr);
    double weighted = 0.0;
    std::size_t n = 0;
    for (const auto& r : byType->rows) {
        weighted += r.mean * static_cast<double>(r.n);
        n += r.n;
    }
    CHECK(n == report.scoredCount(Measure::ER));
    CHECK(weighted / static_cast<double>(n) == doctest::Approx(report.overallMean(Measure::ER)).epsilon(1e-12));

    // Every parameter table partitions the same scored observations.
    for (const auto& t : report.tables) {
        if (t.scope != kOverallScope) continue;
        std::size_t total = 0;
        for (const auto& r : t.rows) total += r.n;
        CHECK(total == report.scoredCount(t.measure));
    }
    CHECK(report.ootCount + report.erCount == obs.size());
    CHECK_FALSE(report.find("color", Parameter::Type, Measure::ER));
    CHECK(report.find("color", Parameter::NColors, Measure::RT) != nullptr);
}

TEST_CASE("performance report orders rows, reports gaps and round-trips") {
    std::vector<Observation> obs;
    for (int c : {5, 2}) {
        for (int i = 0; i < 4; ++i) {
            Observation o;
            o.config = configOf(OutlierType::Color, c, 1);
            o.error = i == 0 ? 1.0 : 0.0;
            o.rtMs = 1000.0 * c + i;
            obs.push_back(o);
        }
    }
    ReportOptions opts;
    opts.parameters = {Parameter::NColors, Parameter::DiffStimuli};
    auto report = buildPerformanceReport(obs, opts);
    const auto* t = report.find(kOverallScope, Parameter::NColors, Measure::ER);
    REQUIRE(t != nullptr);
    REQUIRE(t->rows.size() == 2);
    CHECK(t->rows[0].label == "2");
    CHECK(t->rows[1].label == "5");
    CHECK(t->rows[0].mean == doctest::Approx(0.25));
    CHECK(t->rows[0].sd == doctest::Approx(0.5));
    CHECK(std::find(t->coverageGaps.begin(), t->coverageGaps.end(), "7") != t->coverageGaps.end());

    const auto* d = report.find(kOverallScope, Parameter::DiffStimuli, Measure::RT);
    REQUIRE(d != nullptr);
    CHECK(d->rows[0].label == "1");  // color (2,1): (2-1)*1
    CHECK(d->rows[1].label == "4");  // color (5,1): (5-1)*1

    opts.fullDomain = true;
    auto full = buildPerformanceReport(obs, opts);
    const auto* ft = full.find(kOverallScope, Parameter::NColors, Measure::ER);
    CHECK(ft->rows.size() == 7);
    CHECK(std::isnan(ft->row("7")->mean));

    auto back = reportFromJson(toJson(full));
    CHECK(toJson(back) == toJson(full));
}

namespace {

/// Observations with each subject sharing the same per-value signal plus a
/// small subject offset.
std::vector<Observation> simulatedSubjects(int subjects, double noise, std::uint64_t seed) {
    Engine rng(seed);
    std::vector<Observation> obs;
    for (int s = 0; s < subjects; ++s) {
        for (int c = 2; c <= 7; ++c) {
            for (int rep = 0; rep < 4; ++rep) {
                Observation o;
                o.subject = "subj" + std::to_string(s);
                o.config = configOf(OutlierType::Color, c, 1);
                o.rtMs = 1000.0 * c + noise * (uniformUnit(rng) - 0.5);
                o.error = 0.0;
                obs.push_back(o);
            }
        }
    }
    return obs;
}

}  // namespace

TEST_CASE("sensitivity curve uses the 18 fractions and 10 samplings") {
    const auto fractions = defaultSensitivityFractions();
    REQUIRE(fractions.size() == 18);
    CHECK(fractions.front() == doctest::Approx(0.10));
    CHECK(fractions.back() == doctest::Approx(0.95));

    const auto obs = simulatedSubjects(21, 1500.0, 1);
    const auto curve = sensitivityAnalysis(obs, Parameter::NColors, Measure::RT, 42);
    REQUIRE(curve.points.size() == 18);
    for (const auto& p : curve.points) CHECK(p.rhos.size() == 10);
    const auto half = std::find_if(curve.points.begin(), curve.points.end(),
                                   [](const SensitivityPoint& p) { return std::abs(p.fraction - 0.5) < 1e-9; });
    REQUIRE(half != curve.points.end());
    CHECK(half->subsetSize == 10);
    CHECK(half->meanRho >= 0.8);
    CHECK(curve.points.back().meanRho >= curve.points.front().meanRho);

    const auto again = sensitivityAnalysis(obs, Parameter::NColors, Measure::RT, 42);
    CHECK(toJson(again) == toJson(curve));
    CHECK(toJson(sensitivityFromJson(toJson(curve))) == toJson(curve));
}

TEST_CASE("sensitivity on identical subjects and the full fraction") {
    const auto obs = simulatedSubjects(6, 0.0, 1);
    const auto curve = sensitivityAnalysis(obs, Parameter::NColors, Measure::RT, 9);
    for (const auto& p : curve.points) CHECK(p.meanRho == doctest::Approx(1.0));

    const auto noisy = simulatedSubjects(8, 8000.0, 2);
    const auto whole = sensitivityAnalysis(noisy, Parameter::NColors, Measure::RT, 9, {1.0});
    REQUIRE(whole.points.size() == 1);
    CHECK(whole.points[0].meanRho == doctest::Approx(1.0));

    WarningCapture capture;
    const auto skipped = sensitivityAnalysis(noisy, Parameter::NColors, Measure::RT, 9, {0.05, 0.5});
    REQUIRE(skipped.points.size() == 1);
    CHECK(skipped.points[0].fraction == doctest::Approx(0.5));
    CHECK(capture.messages.size() == 1);

    CHECK_THROWS_AS(sensitivityAnalysis(simulatedSubjects(2, 0.0, 1), Parameter::NColors, Measure::RT, 1),
                    std::invalid_argument);
}

namespace {

/// Observations reproducing the qualitative outcome described for the human
/// study: red fastest and error-free, conjunction hardest with a nColors
/// effect only between 2 and larger values, a nColors effect within color,
/// and a nShapes effect within shape.
std::vector<Observation> paperPatternObservations() {
    std::vector<Observation> obs;
    const int subjects = 21;
    auto errorOf = [](int s, double rate) { return (s % 20) < std::lround(rate * 20) ? 1.0 : 0.0; };
    for (auto type : kAllTypes) {
        for (int c : {2, 4, 5, 7}) {
            for (int sh : {2, 3, 5}) {
                if (c == 7 && type != OutlierType::Color) continue;
                if (!isFeasible(type, c, sh)) continue;
                for (int s = 0; s < subjects; ++s) {
                    Observation o;
                    o.subject = "s" + std::to_string(s);
                    o.config = configOf(type, c, sh);
                    const double noise = (s % 7) * 50.0;
                    double rate = 0.0, rt = 0.0;
                    switch (type) {
                    case OutlierType::Redundant: rate = 0.0; rt = 2500; break;
                    case OutlierType::Color: rate = c == 7 ? 0.4 : 0.05; rt = 4000 + 200.0 * c; break;
                    case OutlierType::Shape: rate = sh == 5 ? 0.3 : 0.0; rt = 5500; break;
                    case OutlierType::Conjunction: rate = c == 2 ? 0.1 : 0.45; rt = c == 2 ? 11000 : 15000; break;
                    }
                    o.error = errorOf(s, rate);
                    o.rtMs = rt + noise;
                    obs.push_back(o);
                }
            }
        }
    }
    return obs;
}

Verdict verdictOf(const std::vector<HypothesisVerdict>& v, HypothesisId id) {
    for (const auto& h : v) {
        if (h.id == id) return h.verdict;
    }
    FAIL("verdict missing");
    return Verdict::Inconclusive;
}

}  // namespace

TEST_CASE("hypotheses on the described outcome pattern") {
    const auto report = buildPerformanceReport(paperPatternObservations());
    const auto verdicts = evaluateHypotheses(report);
    REQUIRE(verdicts.size() == 5);
    for (const auto& v : verdicts) {
        INFO(nameOf(v.id), " ", toJson(std::vector<HypothesisVerdict>{v}).dump());
        CHECK_FALSE(v.evidence.empty());
    }
    CHECK(verdictOf(verdicts, HypothesisId::Type) == Verdict::Accepted);
    CHECK(verdictOf(verdicts, HypothesisId::Conj) == Verdict::Accepted);
    CHECK(verdictOf(verdicts, HypothesisId::Red) == Verdict::Accepted);
    CHECK(verdictOf(verdicts, HypothesisId::Color) == Verdict::Accepted);
    CHECK(verdictOf(verdicts, HypothesisId::Shape) == Verdict::Rejected);
}

TEST_CASE("hypotheses on flat data are never accepted") {
    std::vector<Observation> obs;
    for (const auto& t : feasibleTriples()) {
        for (int s = 0; s < 10; ++s) {
            Observation o;
            o.subject = "s" + std::to_string(s);
            o.config = configOf(t.type, t.nColors, t.nShapes);
            o.error = s == 0 ? 1.0 : 0.0;
            o.rtMs = 3000.0 + s;
            obs.push_back(o);
        }
    }
    for (const auto& v : evaluateHypotheses(buildPerformanceReport(obs))) {
        INFO(nameOf(v.id));
        CHECK(v.verdict != Verdict::Accepted);
    }
}

TEST_CASE("hypotheses with missing graphs are inconclusive") {
    PerformanceReport empty;
    for (const auto& v : evaluateHypotheses(empty)) {
        CHECK(v.verdict == Verdict::Inconclusive);
        CHECK_FALSE(v.evidence.empty());
    }
}

TEST_CASE("H_shape is accepted when shape is flat and 5 shapes help within color") {
    std::vector<Observation> obs;
    for (int s = 0; s < 21; ++s) {
        for (int sh : {2, 3, 5}) {
            Observation shape;
            shape.subject = "s" + std::to_string(s);
            shape.config = configOf(OutlierType::Shape, 3, sh);
            shape.error = 0.0;
            shape.rtMs = 4000 + s;
            obs.push_back(shape);
            Observation color = shape;
            color.config = configOf(OutlierType::Color, 3, sh);
            color.rtMs = (sh == 5 ? 2000 : 6000) + s;
            obs.push_back(color);
        }
    }
    const auto verdicts = evaluateHypotheses(buildPerformanceReport(obs));
    CHECK(verdictOf(verdicts, HypothesisId::Shape) == Verdict::Accepted);
}
