#include "olab/stats/rank_tests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "olab/core/log.hpp"

namespace olab::stats {

std::vector<double> averageRanks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

double tieTerm(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        term += t * t * t - t;
        i = j;
    }
    return term;
}

double chiSquareSurvival(double x, int df) {
    if (df <= 0) throw std::invalid_argument("chi-square needs df >= 1");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}

KruskalWallisResult kruskalWallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("kruskalWallis needs at least 2 groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("kruskalWallis groups must be nonempty");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const double n = static_cast<double>(pooled.size());
    KruskalWallisResult result;
    result.df = static_cast<int>(groups.size()) - 1;

    const double ties = tieTerm(pooled);
    const double correction = 1.0 - ties / (n * n * n - n);
    if (correction <= 0.0) return result;  // every value identical

    const auto ranks = averageRanks(pooled);
    double sum = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double r = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) r += ranks[offset + i];
        offset += g.size();
        sum += r * r / static_cast<double>(g.size());
    }
    const double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
    result.h = std::max(0.0, h);
    result.p = chiSquareSurvival(result.h, result.df);
    return result;
}

namespace {

double exactRankSumP(const std::vector<long>& doubledRanks, std::size_t n1, long observed) {
    const std::size_t n = doubledRanks.size();
    const long maxSum = std::accumulate(doubledRanks.begin(), doubledRanks.end(), 0L);
    // ways[k][s]: number of k-subsets whose doubled rank sum is s.
    std::vector<std::vector<std::uint64_t>> ways(n1 + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(maxSum) + 1, 0));
    ways[0][0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const long r = doubledRanks[i];
        for (std::size_t k = std::min(n1, i + 1); k >= 1; --k) {
            auto& dst = ways[k];
            const auto& src = ways[k - 1];
            for (long s = maxSum; s >= r; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
        }
    }
    const long center = static_cast<long>(n1) * static_cast<long>(n + 1);  // twice the mean
    const long dev = std::labs(observed - center);
    std::uint64_t total = 0;
    std::uint64_t extreme = 0;
    for (long s = 0; s <= maxSum; ++s) {
        const auto w = ways[n1][static_cast<std::size_t>(s)];
        total += w;
        if (std::labs(s - center) >= dev) extreme += w;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

RankSumResult wilcoxonRankSum(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wilcoxonRankSum samples must be nonempty");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = averageRanks(pooled);
    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double n = n1 + n2;

    RankSumResult result;
    result.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    result.expected = n1 * (n + 1.0) / 2.0;

    const double ties = tieTerm(pooled);
    if (ties == n * n * n - n) return result;  // all values equal: p = 1

    if (a.size() < kExactRankSumLimit && b.size() < kExactRankSumLimit) {
        std::vector<long> doubled(ranks.size());
        for (std::size_t i = 0; i < ranks.size(); ++i) doubled[i] = std::lround(2.0 * ranks[i]);
        const long observed = std::accumulate(doubled.begin(), doubled.begin() + static_cast<std::ptrdiff_t>(a.size()), 0L);
        result.exact = true;
        result.p = exactRankSumP(doubled, a.size(), observed);
        return result;
    }

    const double variance = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if (variance <= 0.0) return result;
    const double diff = std::abs(result.statistic - result.expected);
    const double z = std::max(0.0, diff - 0.5) / std::sqrt(variance);
    result.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman needs equal-length sequences");
    if (a.size() < 2) throw std::invalid_argument("spearman needs at least 2 pairs");
    const auto ra = averageRanks(a);
    const auto rb = averageRanks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        warn("spearman: zero rank variance, correlation defined as 0");
        return 0.0;
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace olab::stats
