#include "edapp/gof.hpp"

#include <algorithm>
#include <cmath>

#include "edapp/errors.hpp"
#include "edapp/model.hpp"

namespace edapp {

double aic(int n_params, double nll) {
    if (n_params < 1) throw ValidationError("AIC needs at least one parameter");
    return 2.0 * n_params + 2.0 * nll;
}

double ks_statistic(const EventTrain& events, const ModelParams& params,
                    std::span<const TrialCovariates> trials) {
    const std::size_t n = events.size();
    if (n == 0) throw ValidationError("KS statistic undefined for an empty event train");

    const double total = compensator(params, trials, events.duration_s);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw NumericError("compensator not positive over the observation window");
    }

    const auto cumulative = compensator_at(params, trials, events.onsets);
    // sup |F_emp - F_model| is attained at an event time, comparing the
    // model CDF against the pre-jump and post-jump empirical values.
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f_model = cumulative[i] / total;
        const double pre = static_cast<double>(i) / static_cast<double>(n);
        const double post = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max(d, std::max(f_model - pre, post - f_model));
    }
    return d;
}

double ks_threshold(std::size_t n_events, double alpha_coeff) {
    if (n_events < 1) throw ValidationError("KS threshold needs at least one event");
    return alpha_coeff / std::sqrt(static_cast<double>(n_events));
}

GofReport gof_report(const SubjectRecord& subject, const FitReport& fit) {
    GofReport report;
    report.nll = fit.nll;
    report.aic = aic(variant_n_params(fit.params.variant), fit.nll);
    report.n_events = subject.events.size();
    if (report.n_events > 0) {
        report.ks_d = ks_statistic(subject.events, fit.params, subject.trials);
        report.ks_threshold = ks_threshold(report.n_events);
        report.passes_ks = report.ks_d < report.ks_threshold;
    } else {
        report.ks_d = 1.0;
        report.ks_threshold = 0.0;
        report.passes_ks = false;
    }
    return report;
}

std::array<GofReport, 3> compare_models(const SubjectRecord& subject,
                                        const FitReport& homogeneous,
                                        const FitReport& trial_modulated,
                                        const FitReport& full) {
    return {gof_report(subject, homogeneous), gof_report(subject, trial_modulated),
            gof_report(subject, full)};
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// sample standard deviation (n - 1), as usually reported in tables
double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::array<VariantSummary, 3> aggregate_comparison(const CohortDataset& cohort) {
    constexpr std::array<Variant, 3> kOrder = {Variant::kHomogeneous,
                                               Variant::kTrialModulated, Variant::kFull};
    std::array<VariantSummary, 3> out;
    for (std::size_t vi = 0; vi < kOrder.size(); ++vi) {
        const Variant v = kOrder[vi];
        std::vector<double> nlls, aics, kss;
        double passes = 0.0;
        for (const auto& subject : cohort.subjects) {
            const auto it = subject.fits.find(v);
            if (it == subject.fits.end()) {
                throw ValidationError("subject " + subject.record.subject_id +
                                      " lacks a fit for variant " + variant_name(v));
            }
            const GofReport g = gof_report(subject.record, it->second);
            nlls.push_back(g.nll);
            aics.push_back(g.aic);
            kss.push_back(g.ks_d);
            if (g.passes_ks) passes += 1.0;
        }
        VariantSummary& s = out[vi];
        s.variant = v;
        s.n_params = variant_n_params(v);
        s.nll_mean = mean_of(nlls);
        s.nll_sd = sd_of(nlls);
        s.aic_mean = mean_of(aics);
        s.aic_sd = sd_of(aics);
        s.ks_mean = mean_of(kss);
        s.ks_median = median_of(kss);
        s.ks_pass_rate = cohort.subjects.empty()
                             ? 0.0
                             : passes / static_cast<double>(cohort.subjects.size());
    }
    return out;
}

std::vector<double> time_rescale(const EventTrain& events, const ModelParams& params,
                                 std::span<const TrialCovariates> trials) {
    if (events.size() == 0) {
        throw ValidationError("time rescaling undefined for an empty event train");
    }
    const auto cumulative = compensator_at(params, trials, events.onsets);
    std::vector<double> intervals(events.size());
    double prev = 0.0;  // Lambda(0) = 0
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        intervals[i] = cumulative[i] - prev;
        prev = cumulative[i];
    }
    return intervals;
}

}  // namespace edapp
