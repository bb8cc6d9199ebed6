#include "nkma/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nkma::stats {

std::vector<double> mid_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j + 1);  // 1-based
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = shared;
        i = j;
    }
    return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

namespace {

// Regularized incomplete gamma Q(a, x), series/continued-fraction split.
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad args");
    if (x == 0.0) return 1.0;
    const double log_gamma_a = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, return 1 - P
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
        return 1.0 - p;
    }
    // Q(a,x) by Lentz continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma_a) * h;
}

double tie_sum(const std::vector<double>& pooled) {
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        sum += t * t * t - t;
        i = j;
    }
    return sum;
}

}  // namespace

double chi_square_sf(double x, double degrees_of_freedom) {
    if (x <= 0.0) return 1.0;
    return gamma_q(degrees_of_freedom / 2.0, x / 2.0);
}

KruskalWallisResult kruskal_wallis(
    const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) {
        throw std::invalid_argument("kruskal_wallis: need >= 2 groups");
    }
    std::vector<double> pooled;
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
    const double n = static_cast<double>(pooled.size());
    const std::vector<double> ranks = mid_ranks(pooled);

    KruskalWallisResult result;
    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
        offset += g.size();
        h += rank_sum * rank_sum / static_cast<double>(g.size());
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    const double ties = tie_sum(pooled);
    const double correction = 1.0 - ties / (n * n * n - n);
    if (correction <= 0.0) {
        // all pooled values identical
        result.h = 0.0;
        result.p_value = 1.0;
        return result;
    }
    result.h = h / correction;
    result.p_value =
        chi_square_sf(result.h, static_cast<double>(groups.size() - 1));
    return result;
}

std::vector<double> holm_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p_values[a] < p_values[b];
    });
    std::vector<double> adjusted(m, 0.0);
    double running_max = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        const double scaled =
            static_cast<double>(m - rank) * p_values[order[rank]];
        running_max = std::max(running_max, scaled);
        adjusted[order[rank]] = std::min(1.0, running_max);
    }
    return adjusted;
}

std::vector<DunnPair> dunn_holm(const std::vector<std::vector<double>>& groups,
                                std::ptrdiff_t reference) {
    if (groups.size() < 2) {
        throw std::invalid_argument("dunn_holm: need >= 2 groups");
    }
    for (const auto& g : groups) {
        if (g.size() < 2) {
            throw std::invalid_argument("dunn_holm: each group needs >= 2 samples");
        }
    }
    if (reference >= static_cast<std::ptrdiff_t>(groups.size())) {
        throw std::invalid_argument("dunn_holm: reference out of range");
    }

    std::vector<double> pooled;
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
    const double n = static_cast<double>(pooled.size());
    const std::vector<double> ranks = mid_ranks(pooled);

    std::vector<double> mean_rank(groups.size(), 0.0);
    std::size_t offset = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double sum = 0.0;
        for (std::size_t i = 0; i < groups[g].size(); ++i) {
            sum += ranks[offset + i];
        }
        offset += groups[g].size();
        mean_rank[g] = sum / static_cast<double>(groups[g].size());
    }

    const double ties = tie_sum(pooled);
    // Variance term n(n+1)/12 - T/(12(n-1)); zero when everything ties.
    const double variance =
        n * (n + 1.0) / 12.0 - ties / (12.0 * (n - 1.0));

    std::vector<DunnPair> pairs;
    auto add_pair = [&](std::size_t a, std::size_t b) {
        DunnPair pair;
        pair.group_a = a;
        pair.group_b = b;
        if (variance <= 0.0) {
            pair.z = 0.0;
            pair.p_raw = 1.0;
        } else {
            const double se = std::sqrt(
                variance * (1.0 / static_cast<double>(groups[a].size()) +
                            1.0 / static_cast<double>(groups[b].size())));
            pair.z = std::fabs(mean_rank[a] - mean_rank[b]) / se;
            pair.p_raw = std::min(1.0, 2.0 * normal_sf(pair.z));
        }
        pairs.push_back(pair);
    };

    if (reference >= 0) {
        const auto ref = static_cast<std::size_t>(reference);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (g != ref) add_pair(ref, g);
        }
    } else {
        for (std::size_t a = 0; a < groups.size(); ++a) {
            for (std::size_t b = a + 1; b < groups.size(); ++b) add_pair(a, b);
        }
    }

    std::vector<double> raw(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) raw[i] = pairs[i].p_raw;
    const std::vector<double> adjusted = holm_adjust(raw);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        pairs[i].p_adjusted = adjusted[i];
    }
    return pairs;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace nkma::stats
