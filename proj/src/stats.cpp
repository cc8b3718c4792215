#include "edapp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edapp/errors.hpp"

namespace edapp {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for the upper tail
double gamma_q_contfrac(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_squared_sf(double x, int df) {
    if (df < 1) throw ValidationError("chi-squared needs df >= 1");
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * df;
    const double xx = 0.5 * x;
    return xx < a + 1.0 ? 1.0 - gamma_p_series(a, xx) : gamma_q_contfrac(a, xx);
}

namespace {

// midranks of the pooled sample; also reports tie group sizes
struct Ranking {
    std::vector<double> ranks;
    std::vector<std::size_t> tie_sizes;
    bool has_ties = false;
};

Ranking midranks(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    Ranking r;
    r.ranks.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r.ranks[order[k]] = rank;
        r.tie_sizes.push_back(j - i + 1);
        if (j > i) r.has_ties = true;
        i = j + 1;
    }
    return r;
}

struct UStat {
    double u_min = 0.0;
    double u_x = 0.0;
    bool has_ties = false;
    std::vector<std::size_t> tie_sizes;
};

UStat u_statistic(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) {
        throw ValidationError("Mann-Whitney needs non-empty samples");
    }
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const Ranking r = midranks(pooled);
    double rank_sum_x = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) rank_sum_x += r.ranks[i];
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    UStat u;
    u.u_x = rank_sum_x - nx * (nx + 1.0) / 2.0;
    u.u_min = std::min(u.u_x, nx * ny - u.u_x);
    u.has_ties = r.has_ties;
    u.tie_sizes = r.tie_sizes;
    return u;
}

}  // namespace

double mann_whitney_exact_p(std::span<const double> x, std::span<const double> y) {
    const UStat u = u_statistic(x, y);
    if (u.has_ties) {
        throw ValidationError("exact Mann-Whitney enumeration requires tie-free data");
    }
    const std::size_t nx = x.size();
    const std::size_t n = x.size() + y.size();
    const std::size_t max_sum = n * (n + 1) / 2;

    // ways[k][s]: k-subsets of ranks {1..n} with rank sum s
    std::vector<std::vector<double>> ways(nx + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t rank = 1; rank <= n; ++rank) {
        for (std::size_t k = std::min(rank, nx); k >= 1; --k) {
            for (std::size_t s = max_sum; s >= rank; --s) {
                ways[k][s] += ways[k - 1][s - rank];
            }
        }
    }
    const std::size_t offset = nx * (nx + 1) / 2;
    double below = 0.0;
    double total = 0.0;
    for (std::size_t s = offset; s <= max_sum; ++s) {
        total += ways[nx][s];
        if (static_cast<double>(s - offset) <= u.u_min) below += ways[nx][s];
    }
    return std::min(1.0, 2.0 * below / total);
}

double mann_whitney_normal_p(std::span<const double> x, std::span<const double> y) {
    const UStat u = u_statistic(x, y);
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double n = nx + ny;
    double tie_term = 0.0;
    for (std::size_t t : u.tie_sizes) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double var =
        nx * ny / 12.0 * ((n + 1.0) - (n > 1.0 ? tie_term / (n * (n - 1.0)) : 0.0));
    if (var <= 0.0) return 1.0;  // fully tied data carry no ordering information
    // continuity correction toward the mean; u_min never exceeds the mean
    double z = (u.u_min - nx * ny / 2.0 + 0.5) / std::sqrt(var);
    z = std::min(z, 0.0);
    return std::min(1.0, 2.0 * normal_cdf(z));
}

MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y) {
    const UStat u = u_statistic(x, y);
    MannWhitneyResult result;
    result.u = u.u_min;
    result.exact = !u.has_ties && x.size() + y.size() <= 20;
    result.p_value =
        result.exact ? mann_whitney_exact_p(x, y) : mann_whitney_normal_p(x, y);
    return result;
}

KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ValidationError("Kruskal-Wallis needs at least 2 groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw ValidationError("Kruskal-Wallis groups must be non-empty");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const Ranking r = midranks(pooled);
    const double n = static_cast<double>(pooled.size());

    KruskalWallisResult result;
    result.df = static_cast<int>(groups.size()) - 1;

    double stat = 0.0;
    std::size_t pos = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += r.ranks[pos + i];
        pos += g.size();
        stat += rank_sum * rank_sum / static_cast<double>(g.size());
    }
    double h = 12.0 / (n * (n + 1.0)) * stat - 3.0 * (n + 1.0);

    double tie_term = 0.0;
    for (std::size_t t : r.tie_sizes) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction <= 0.0) {
        result.h = 0.0;  // every observation identical
        result.p_value = 1.0;
        return result;
    }
    h /= correction;
    result.h = std::max(h, 0.0);
    result.p_value = chi_squared_sf(result.h, result.df);
    return result;
}

FdrResult bh_fdr(std::span<const double> p_values, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("FDR rate must be in (0, 1)");
    const std::size_t m = p_values.size();
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p-values must be in [0, 1]");
    }
    FdrResult result;
    result.reject.assign(m, false);
    result.adjusted.assign(m, 1.0);
    if (m == 0) return result;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p_values[a] < p_values[b];
    });

    // step-up rejection threshold
    std::size_t cutoff = 0;  // number of rejected hypotheses
    for (std::size_t i = m; i >= 1; --i) {
        if (p_values[order[i - 1]] <=
            static_cast<double>(i) * q / static_cast<double>(m)) {
            cutoff = i;
            break;
        }
    }
    for (std::size_t i = 0; i < cutoff; ++i) result.reject[order[i]] = true;

    // adjusted p-values by cumulative minimum from the largest p down
    double running = 1.0;
    for (std::size_t i = m; i >= 1; --i) {
        const double adj =
            p_values[order[i - 1]] * static_cast<double>(m) / static_cast<double>(i);
        running = std::min(running, std::min(adj, 1.0));
        result.adjusted[order[i - 1]] = running;
    }
    return result;
}

double cohens_d(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) {
        throw ValidationError("Cohen's d needs at least 2 samples per group");
    }
    auto mean = [](std::span<const double> v) {
        double s = 0.0;
        for (double e : v) s += e;
        return s / static_cast<double>(v.size());
    };
    auto ss = [&](std::span<const double> v, double m) {
        double s = 0.0;
        for (double e : v) s += (e - m) * (e - m);
        return s;
    };
    const double mx = mean(x);
    const double my = mean(y);
    const double pooled_var = (ss(x, mx) + ss(y, my)) /
                              static_cast<double>(x.size() + y.size() - 2);
    if (!(pooled_var > 0.0)) {
        throw ValidationError("Cohen's d undefined: zero pooled standard deviation");
    }
    return (mx - my) / std::sqrt(pooled_var);
}

}  // namespace edapp
