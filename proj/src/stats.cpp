#include "chairsearch/stats.hpp"

#include "chairsearch/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chairsearch::stats {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Sum of (t^3 - t) over tie groups.
double tie_term(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        const double t = static_cast<double>(j - i);
        sum += t * t * t - t;
        i = j;
    }
    return sum;
}

// P(W+ >= w) under the null, by counting sign patterns.
double exact_upper_tail(std::size_t n, double w) {
    const std::size_t max_sum = n * (n + 1) / 2;
    std::vector<double> counts(max_sum + 1, 0.0);
    counts[0] = 1;
    for (std::size_t r = 1; r <= n; ++r)
        for (std::size_t s = max_sum; s >= r; --s) counts[s] += counts[s - r];
    double tail = 0;
    for (std::size_t s = 0; s <= max_sum; ++s)
        if (static_cast<double>(s) >= w) tail += counts[s];
    return tail / std::ldexp(1.0, static_cast<int>(n));
}

} // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "paired samples differ in length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) diffs.push_back(x[i] - y[i]);

    WilcoxonResult res;
    res.n = diffs.size();
    if (res.n == 0) return res;

    std::vector<double> mags(diffs.size());
    std::transform(diffs.begin(), diffs.end(), mags.begin(), [](double d) { return std::abs(d); });
    const auto ranks = average_ranks(mags);
    double w_plus = 0, w_minus = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? w_plus : w_minus) += ranks[i];
    res.w_plus = w_plus;
    res.statistic = std::min(w_plus, w_minus);

    const double n = static_cast<double>(res.n);
    const double ties = tie_term(mags);
    if (res.n <= 50 && ties == 0) {
        res.exact = true;
        res.p_value = std::min(1.0, 2.0 * exact_upper_tail(res.n, std::max(w_plus, w_minus)));
        return res;
    }
    const double mean = n * (n + 1) / 4.0;
    const double var = n * (n + 1) * (2 * n + 1) / 24.0 - ties / 48.0;
    if (var <= 0) return res;
    double d = w_plus - mean;
    if (d != 0) d -= 0.5 * (d > 0 ? 1 : -1);
    res.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(d) / std::sqrt(var)));
    return res;
}

FriedmanResult friedman_test(std::span<const double> matrix, std::size_t rows, std::size_t k, double alpha) {
    if (k < 2 || rows < 2) throw Error(ErrorCode::InvalidInput, "friedman test needs at least 2 blocks and 2 conditions");
    if (matrix.size() != rows * k) throw Error(ErrorCode::DimensionMismatch, "matrix size is not rows * k");

    FriedmanResult res;
    res.df = k - 1;
    res.rank_sums.assign(k, 0.0);
    double ties = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = matrix.subspan(r * k, k);
        const auto ranks = average_ranks(row);
        for (std::size_t c = 0; c < k; ++c) res.rank_sums[c] += ranks[c];
        ties += tie_term(row);
    }
    const double n = static_cast<double>(rows), kk = static_cast<double>(k);
    double ssum = 0;
    for (double rs : res.rank_sums) ssum += rs * rs;
    const double q = 12.0 / (n * kk * (kk + 1)) * ssum - 3.0 * n * (kk + 1);
    const double c = 1.0 - ties / (n * kk * (kk * kk - 1));
    res.statistic = c > 0 ? q / c : 0.0;
    if (res.statistic > 0) {
        boost::math::chi_squared dist(static_cast<double>(res.df));
        res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    }

    const std::size_t pairs = k * (k - 1) / 2;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            std::vector<double> xa(rows), xb(rows);
            for (std::size_t r = 0; r < rows; ++r) {
                xa[r] = matrix[r * k + a];
                xb[r] = matrix[r * k + b];
            }
            PairwiseComparison pc;
            pc.a = a;
            pc.b = b;
            pc.test = wilcoxon_signed_rank(xa, xb);
            pc.p_adjusted = std::min(1.0, pc.test.p_value * static_cast<double>(pairs));
            pc.significant = pc.p_adjusted < alpha;
            res.pairwise.push_back(pc);
        }
    }
    return res;
}

} // namespace chairsearch::stats
