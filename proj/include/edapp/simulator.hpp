#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edapp/cohort.hpp"
#include "edapp/likelihood.hpp"
#include "edapp/optimizer.hpp"
#include "edapp/types.hpp"

namespace edapp {

struct RtLogNormal {
    double log_mean = -0.6;  // log-seconds
    double log_sd = 0.25;
};

// Block-structured task schedule: each block is a rest period followed by
// fixed-pace trials. Per-block valence counts are balanced to p_negative.
struct TrialScheduleConfig {
    int n_blocks = 4;
    int trials_per_block = 120;
    double rest_s = 30.0;
    double stimulus_s = 0.5;
    double inter_trial_s = 1.5;
    double p_negative = 0.5;
    double p_error = 0.03;             // incorrect or missed responses
    double p_miss_given_error = 0.25;  // errors without any response
    RtLogNormal rt;

    void validate() const;
    double session_duration() const;
};

struct Schedule {
    std::vector<RawTrial> raw;
    std::vector<TrialCovariates> trials;
    double duration_s = 0.0;
};

Schedule gen_trial_schedule(const TrialScheduleConfig& config, std::uint64_t seed);

// Exact continuous-time draw by superposition: a homogeneous Poisson
// component plus one truncated-exponential cluster per answered trial.
EventTrain simulate_exact(const ModelParams& params,
                          std::span<const TrialCovariates> trials, double T,
                          std::uint64_t seed);

// Independent Poisson counts per bin with mean lambda(t_k) * width_k.
BinnedCounts simulate_binned(const ModelParams& params,
                             std::span<const TrialCovariates> trials, double dt, double T,
                             std::uint64_t seed);

// Per-parameter truncated-normal distribution of theta within a group.
struct ThetaDistribution {
    ModelParams mean;  // mean.variant is the generating variant
    double mu_sd = 0.0, a0_sd = 0.0, w_neg_sd = 0.0, w_rt_sd = 0.0, w_err_sd = 0.0,
           tau_sd = 0.0;
};

struct GroupSpec {
    std::string label;
    int n_subjects = 0;
    ThetaDistribution theta;
};

struct CohortSpec {
    std::vector<GroupSpec> groups;
    std::uint64_t seed = 0;
    TrialScheduleConfig schedule;
    BoxBounds bounds;  // truncation box for sampled parameters
    std::string id_prefix = "sub";

    void validate() const;
};

// Labeled synthetic cohort: per subject a theta draw, a schedule, and an
// exact event train. Ground truth for the end-to-end pipeline checks.
CohortDataset gen_cohort(const CohortSpec& spec);

}  // namespace edapp
