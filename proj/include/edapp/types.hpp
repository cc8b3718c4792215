#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace edapp {

enum class Variant {
    kHomogeneous,     // lambda_1(t) = mu
    kTrialModulated,  // common kernel amplitude, no covariates
    kFull,            // covariate-modulated kernel amplitudes
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Free parameters: 1 (mu), 3 (mu, a0, tau), 6 (mu, a0, w_neg, w_rt, w_err, tau)
int variant_n_params(Variant v);

// An ordered train of event onset times over an observation window.
struct EventTrain {
    std::vector<double> onsets;  // seconds from task start, strictly increasing
    double duration_s = 0.0;     // observation window T

    std::size_t size() const { return onsets.size(); }
    // Throws ValidationError on violated invariants.
    void validate() const;
};

// Per-trial covariates feeding the amplitude link. A missed trial has no
// response timestamp and therefore triggers no kernel.
struct TrialCovariates {
    std::optional<double> response_time_s;  // rho_j, seconds from task start
    std::optional<double> raw_rt_s;         // raw reaction time, seconds
    double x_neg = 0.0;                     // 1 for negative-valence words
    double x_rt = 0.0;                      // z-scored log reaction time
    double x_err = 0.0;                     // 1 for incorrect or missed responses
};

// Raw trial row as ingested; build_covariates derives TrialCovariates.
struct RawTrial {
    int trial_idx = 0;
    double stim_onset_s = 0.0;
    std::optional<double> response_time_s;
    std::optional<double> raw_rt_s;
    bool negative = false;
    bool correct = true;
};

struct ModelParams {
    Variant variant = Variant::kFull;
    double mu = 0.0;     // baseline rate, events/s
    double a0 = 0.0;     // kernel base amplitude, events/s
    double w_neg = 0.0;  // valence weight
    double w_rt = 0.0;   // reaction-time weight
    double w_err = 0.0;  // error weight
    double tau = 1.0;    // kernel decay constant, seconds

    void validate() const;
};

// Optional waveform-derived summaries used by the SCR-baseline classifier arm.
struct SummaryAnnotations {
    std::vector<std::pair<double, double>> tonic_samples;  // (time_s, conductance)
    std::vector<double> scr_amplitudes;
    std::vector<double> scr_rise_times_s;

    void validate(std::size_t n_events) const;
};

struct SubjectRecord {
    std::string subject_id;
    EventTrain events;
    std::vector<TrialCovariates> trials;
    std::optional<SummaryAnnotations> annotations;

    void validate() const;
};

}  // namespace edapp
