#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nkma::stats {

/// Mid-ranks of the pooled samples (ties share the average rank).
std::vector<double> mid_ranks(const std::vector<double>& values);

/// Standard normal survival function P(Z > z).
double normal_sf(double z);

/// Upper-tail chi-square probability (regularized incomplete gamma).
double chi_square_sf(double x, double degrees_of_freedom);

struct KruskalWallisResult {
    double h = 0.0;       // tie-corrected H statistic
    double p_value = 1.0; // chi-square approximation
};

KruskalWallisResult kruskal_wallis(
    const std::vector<std::vector<double>>& groups);

struct DunnPair {
    std::size_t group_a = 0;
    std::size_t group_b = 0;
    double z = 0.0;
    double p_raw = 1.0;       // two-sided
    double p_adjusted = 1.0;  // Holm step-down over the compared pairs
};

/// Dunn post-hoc z-tests on pooled mid-ranks with tie correction,
/// two-sided p-values, Holm adjustment. With `reference` set, only the
/// pairs (reference, other) are compared and adjusted; otherwise all
/// pairs. Groups need >= 2 samples each. Degenerate all-equal pooled
/// samples give p = 1 everywhere.
std::vector<DunnPair> dunn_holm(const std::vector<std::vector<double>>& groups,
                                std::ptrdiff_t reference = -1);

/// Holm step-down adjustment; monotone, each adjusted p >= raw p.
std::vector<double> holm_adjust(const std::vector<double>& p_values);

/// "", "*", "**" or "***" at the 0.05 / 0.01 / 0.001 thresholds.
std::string significance_stars(double p);

}  // namespace nkma::stats
