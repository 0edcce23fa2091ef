#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chairsearch::stats {

/// Ranks 1..n with ties given their average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct WilcoxonResult {
    double statistic = 0;  // min(W+, W-)
    double w_plus = 0;
    std::size_t n = 0;     // non-zero differences
    double p_value = 1;    // two-sided
    bool exact = false;
};

/// Signed-rank test on paired samples; zero differences are dropped. Exact null
/// distribution when n <= 50 without ties, otherwise the normal approximation
/// with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

struct PairwiseComparison {
    std::size_t a = 0, b = 0;
    WilcoxonResult test;
    double p_adjusted = 1;  // Bonferroni
    bool significant = false;
};

struct FriedmanResult {
    double statistic = 0;
    std::size_t df = 0;
    double p_value = 1;
    std::vector<double> rank_sums;
    std::vector<PairwiseComparison> pairwise;
};

/// `rows` blocks x `k` conditions, row-major. Statistic from within-row average
/// ranks with the tie correction; a matrix of constant rows gives 0. The p-value
/// is the chi-square(k-1) upper tail. Throws InvalidInput unless k >= 2 and rows >= 2.
FriedmanResult friedman_test(std::span<const double> matrix, std::size_t rows, std::size_t k, double alpha = 0.05);

} // namespace chairsearch::stats
