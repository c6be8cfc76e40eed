#include "histoprompt/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "histoprompt/core/error.hpp"

namespace histoprompt {

namespace {

double clamp_p(double p) { return std::clamp(p, std::numeric_limits<double>::min(), 1.0); }

// Midranks (1-based) of the pooled sample and the tie-group sizes.
struct Ranking {
    std::vector<double> ranks;
    std::vector<std::size_t> ties;
};

Ranking midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pooled[a] < pooled[b]; });
    Ranking r;
    r.ranks.resize(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) r.ranks[order[t]] = mid;
        r.ties.push_back(j - i + 1);
        i = j + 1;
    }
    return r;
}

std::vector<double> pool(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Power of an m x m matrix with a decimal exponent carried alongside to
// avoid overflow.
void matrix_multiply(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out, std::size_t m) {
    out.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const double aik = a[i * m + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) out[i * m + j] += aik * b[k * m + j];
        }
    }
}

void matrix_power(const std::vector<double>& a, int ea, std::vector<double>& v, int& ev, std::size_t m, std::size_t n) {
    if (n == 1) {
        v = a;
        ev = ea;
        return;
    }
    matrix_power(a, ea, v, ev, m, n / 2);
    std::vector<double> b;
    matrix_multiply(v, v, b, m);
    int eb = 2 * ev;
    if (n % 2 == 0) {
        v = b;
        ev = eb;
    } else {
        matrix_multiply(a, b, v, m);
        ev = ea + eb;
    }
    if (v[(m / 2) * m + m / 2] > 1e140) {
        for (auto& x : v) x *= 1e-140;
        ev += 140;
    }
}

}  // namespace

double binomial_pmf(std::size_t k, std::size_t n, double p) {
    if (k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double nd = static_cast<double>(n), kd = static_cast<double>(k);
    const double log_pmf = std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1) + kd * std::log(p) +
                           (nd - kd) * std::log1p(-p);
    return std::exp(log_pmf);
}

double binomial_test(std::size_t successes, std::size_t n, double p0) {
    if (successes > n) {
        throw Error(ErrorCode::InvalidCounts, std::to_string(successes) + " successes out of " + std::to_string(n));
    }
    if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorCode::InvalidCounts, "p0 must lie in (0, 1)");
    if (n == 0) return 1.0;
    const double observed = binomial_pmf(successes, n, p0);
    // Relative slack so outcomes tied in exact arithmetic are not lost to rounding.
    const double cutoff = observed * (1.0 + 1e-7);
    double p = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double pk = binomial_pmf(k, n, p0);
        if (pk <= cutoff) p += pk;
    }
    return clamp_p(p);
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyGroup, "rank-sum test needs two non-empty samples");
    const auto pooled = pool(a, b);
    const auto ranking = midranks(pooled);
    const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
    const double n = n1 + n2;
    double r1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r1 += ranking.ranks[i];

    RankSumResult out;
    out.u = r1 - n1 * (n1 + 1.0) / 2.0;
    const double mean = n1 * n2 / 2.0;
    double tie_sum = 0.0;
    for (auto t : ranking.ties) {
        const double td = static_cast<double>(t);
        tie_sum += td * td * td - td;
    }
    const double variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (!(variance > 0.0)) {
        out.p_value = 1.0;
        return out;
    }
    const double sd = std::sqrt(variance);
    out.z = (std::abs(out.u - mean) - 0.5) / sd;
    out.p_value = clamp_p(2.0 * normal_cdf(-out.z));
    if (out.u < mean) out.z = -out.z;
    return out;
}

double rank_sum_exact(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyGroup, "rank-sum test needs two non-empty samples");
    const std::size_t n1 = a.size(), n = a.size() + b.size();
    if (n > 20) throw Error(ErrorCode::InvalidArgument, "exact rank-sum enumeration is limited to 20 observations");
    const auto ranking = midranks(pool(a, b));
    const double base = static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
    const double mean = static_cast<double>(n1) * static_cast<double>(n - n1) / 2.0;
    double r1 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r1 += ranking.ranks[i];
    const double observed = std::abs(r1 - base - mean) - 1e-9;

    std::size_t extreme = 0, total = 0;
    // Every n1-subset of positions as a bitmask.
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) r += ranking.ranks[i];
        }
        ++total;
        if (std::abs(r - base - mean) >= observed) ++extreme;
    }
    return clamp_p(static_cast<double>(extreme) / static_cast<double>(total));
}

double kolmogorov_cdf(std::size_t n, double d) {
    if (d <= 0.0) return 0.0;
    if (d >= 1.0) return 1.0;
    const double nd = static_cast<double>(n);
    const double s = d * d * nd;
    if (s > 7.24 || (s > 3.76 && n > 99) || n > 1000) {
        // Tail approximation; accurate where the exact recursion would
        // be expensive and the probability is close to 1.
        if (n > 1000 && s <= 3.76) {
            const double t = (std::sqrt(nd) + 0.12 + 0.11 / std::sqrt(nd)) * d;
            double q = 0.0;
            for (int j = 1; j <= 100; ++j) q += 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * t * t);
            return std::clamp(1.0 - q, 0.0, 1.0);
        }
        return 1.0 - 2.0 * std::exp(-(2.000071 + 0.331 / std::sqrt(nd) + 1.409 / nd) * s);
    }
    const auto k = static_cast<std::size_t>(nd * d) + 1;
    const std::size_t m = 2 * k - 1;
    const double h = static_cast<double>(k) - nd * d;
    std::vector<double> H(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) H[i * m + j] = (i + 1 >= j) ? 1.0 : 0.0;
    }
    for (std::size_t i = 0; i < m; ++i) {
        H[i * m] -= std::pow(h, static_cast<double>(i + 1));
        H[(m - 1) * m + i] -= std::pow(h, static_cast<double>(m - i));
    }
    H[(m - 1) * m] += (2 * h - 1 > 0 ? std::pow(2 * h - 1, static_cast<double>(m)) : 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i + 1 > j) {
                for (std::size_t g = 1; g <= i + 1 - j; ++g) H[i * m + j] /= static_cast<double>(g);
            }
        }
    }
    std::vector<double> Q;
    int eq = 0;
    matrix_power(H, 0, Q, eq, m, n);
    double result = Q[(k - 1) * m + k - 1];
    for (std::size_t i = 1; i <= n; ++i) {
        result = result * static_cast<double>(i) / nd;
        if (result < 1e-140) {
            result *= 1e140;
            eq -= 140;
        }
    }
    result *= std::pow(10.0, eq);
    return std::clamp(result, 0.0, 1.0);
}

KsResult ks_normality(std::span<const double> sample) {
    if (sample.empty()) throw Error(ErrorCode::EmptyGroup, "KS test on an empty sample");
    const std::size_t n = sample.size();
    KsResult out;
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    if (!(sd > 0.0)) {
        out.statistic = 1.0;
        out.p_value = clamp_p(0.0);
        return out;
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = normal_cdf((sorted[i] - mean) / sd);
        d = std::max({d, static_cast<double>(i + 1) / static_cast<double>(n) - f, f - static_cast<double>(i) / static_cast<double>(n)});
    }
    out.statistic = d;
    out.p_value = clamp_p(1.0 - kolmogorov_cdf(n, d));
    return out;
}

}  // namespace histoprompt
