#pragma once

#include <array>
#include <span>
#include <vector>

#include "edapp/cohort.hpp"
#include "edapp/optimizer.hpp"
#include "edapp/types.hpp"

namespace edapp {

struct GofReport {
    double nll = 0.0;
    double aic = 0.0;
    double ks_d = 0.0;
    double ks_threshold = 0.0;
    std::size_t n_events = 0;
    bool passes_ks = false;
};

// AIC = 2P + 2 nll (nll is the negative log-likelihood).
double aic(int n_params, double nll);

// Kolmogorov-Smirnov distance between the empirical CDF of event times and
// the model CDF Lambda(t)/Lambda(T), computed exactly over the step
// breakpoints.
double ks_statistic(const EventTrain& events, const ModelParams& params,
                    std::span<const TrialCovariates> trials);

// th = alpha_coeff / sqrt(n_events)
double ks_threshold(std::size_t n_events, double alpha_coeff = 1.36);

// Full per-model goodness-of-fit summary for one subject.
GofReport gof_report(const SubjectRecord& subject, const FitReport& fit);

// Per-subject comparison row in the fixed order
// (homogeneous, trial_modulated, full).
std::array<GofReport, 3> compare_models(const SubjectRecord& subject,
                                        const FitReport& homogeneous,
                                        const FitReport& trial_modulated,
                                        const FitReport& full);

// Cohort-level aggregation of compare_models rows.
struct VariantSummary {
    Variant variant = Variant::kHomogeneous;
    int n_params = 0;
    double nll_mean = 0.0, nll_sd = 0.0;
    double aic_mean = 0.0, aic_sd = 0.0;
    double ks_mean = 0.0, ks_median = 0.0;
    double ks_pass_rate = 0.0;
};

std::array<VariantSummary, 3> aggregate_comparison(const CohortDataset& cohort);

// Time-rescaling diagnostic: z_i = Lambda(t_i) - Lambda(t_{i-1}) with
// t_0 = 0. Under a correct model the z_i are i.i.d. unit exponential.
std::vector<double> time_rescale(const EventTrain& events, const ModelParams& params,
                                 std::span<const TrialCovariates> trials);

}  // namespace edapp
