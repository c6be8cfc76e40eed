#pragma once

#include <cstddef>
#include <span>

namespace histoprompt {

/// Binomial point probability P(X = k), X ~ Binom(n, p).
double binomial_pmf(std::size_t k, std::size_t n, double p);

/// Exact two-sided binomial test: sum of P(X = i) over outcomes no more
/// likely than the observed one. Throws InvalidCounts.
double binomial_test(std::size_t successes, std::size_t n, double p0 = 0.5);

double normal_cdf(double z) noexcept;

struct RankSumResult {
    double u = 0.0;  // Mann-Whitney U of the first sample
    double z = 0.0;
    double p_value = 1.0;
};

/// Two-sided Wilcoxon rank-sum / Mann-Whitney U test, normal approximation
/// with tie and continuity corrections. Throws EmptyGroup.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b);

/// Exact two-sided rank-sum p-value by enumerating every assignment of the
/// pooled (mid)ranks; p = P(|U - E U| >= |u - E U|). Limited to
/// a.size() + b.size() <= 20.
double rank_sum_exact(std::span<const double> a, std::span<const double> b);

/// Two-sided one-sample Kolmogorov-Smirnov statistic and p-value against
/// N(mean, sd) fitted from the sample (sample sd, divisor n - 1).
struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
KsResult ks_normality(std::span<const double> sample);

/// P(D_n < d) for the one-sample two-sided statistic.
double kolmogorov_cdf(std::size_t n, double d);

}  // namespace histoprompt
