#pragma once

#include <span>
#include <string>
#include <vector>

namespace edapp {

struct MannWhitneyResult {
    double u = 0.0;        // min(U_x, U_y) with midrank ties
    double p_value = 1.0;  // two-sided
    bool exact = false;    // exact enumeration vs normal approximation
};

// Exact enumeration when |x| + |y| <= 20 and the data are tie-free;
// otherwise normal approximation with tie and continuity corrections.
MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y);

// The two p-value routes, exposed for cross-checking.
double mann_whitney_exact_p(std::span<const double> x, std::span<const double> y);
double mann_whitney_normal_p(std::span<const double> x, std::span<const double> y);

struct KruskalWallisResult {
    double h = 0.0;
    double p_value = 1.0;
    int df = 0;
};

KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

struct FdrResult {
    std::vector<bool> reject;
    std::vector<double> adjusted;  // monotone BH-adjusted p-values
};

// Benjamini-Hochberg step-up at rate q.
FdrResult bh_fdr(std::span<const double> p_values, double q = 0.05);

// (mean(x) - mean(y)) / pooled sd with (n-1) weighting.
double cohens_d(std::span<const double> x, std::span<const double> y);

// Standard normal CDF and chi-squared survival function (upper regularized
// incomplete gamma), shared by the tests above.
double normal_cdf(double z);
double chi_squared_sf(double x, int df);

}  // namespace edapp
