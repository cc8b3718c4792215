#include "edapp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edapp/errors.hpp"
#include "edapp/model.hpp"
#include "edapp/rng.hpp"

namespace edapp {

void TrialScheduleConfig::validate() const {
    if (n_blocks < 1 || trials_per_block < 1) throw ConfigError("schedule needs trials");
    if (!(rest_s >= 0.0) || !(stimulus_s > 0.0) || !(inter_trial_s > 0.0)) {
        throw ConfigError("schedule durations must be positive");
    }
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(p_negative) || !prob(p_error) || !prob(p_miss_given_error)) {
        throw ConfigError("schedule probabilities must be in [0, 1]");
    }
    if (!(rt.log_sd >= 0.0)) throw ConfigError("rt log-sd must be non-negative");
}

double TrialScheduleConfig::session_duration() const {
    return n_blocks * (rest_s + trials_per_block * (stimulus_s + inter_trial_s));
}

Schedule gen_trial_schedule(const TrialScheduleConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    Schedule schedule;
    schedule.raw.reserve(static_cast<std::size_t>(config.n_blocks * config.trials_per_block));

    const double slot = config.stimulus_s + config.inter_trial_s;
    const auto n_negative = static_cast<int>(
        std::lround(config.p_negative * config.trials_per_block));

    double t = 0.0;
    int trial_idx = 0;
    for (int block = 0; block < config.n_blocks; ++block) {
        t += config.rest_s;
        std::vector<int> valence(static_cast<std::size_t>(config.trials_per_block), 0);
        std::fill_n(valence.begin(), n_negative, 1);
        rng.shuffle(valence);
        for (int j = 0; j < config.trials_per_block; ++j) {
            RawTrial trial;
            trial.trial_idx = trial_idx++;
            trial.stim_onset_s = t;
            trial.negative = valence[static_cast<std::size_t>(j)] == 1;
            const bool error = rng.bernoulli(config.p_error);
            const bool miss = error && rng.bernoulli(config.p_miss_given_error);
            trial.correct = !error;
            if (!miss) {
                // responses stay inside their trial slot so they never
                // outlive the session window
                double rt = rng.lognormal(config.rt.log_mean, config.rt.log_sd);
                rt = std::min(rt, slot - 1e-6);
                trial.raw_rt_s = rt;
                trial.response_time_s = t + rt;
            }
            schedule.raw.push_back(trial);
            t += slot;
        }
    }
    schedule.duration_s = t;
    schedule.trials = build_covariates(schedule.raw);
    return schedule;
}

namespace {

// Strictly increasing times within [0, T]; float-coincident samples are
// separated by 1 us nudges.
void enforce_strict_order(std::vector<double>& times, double T) {
    std::sort(times.begin(), times.end());
    constexpr double kNudge = 1e-6;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1]) times[i] = times[i - 1] + kNudge;
    }
    if (!times.empty() && times.back() > T) {
        times.back() = T;
        for (std::size_t i = times.size() - 1; i-- > 0;) {
            if (times[i] >= times[i + 1]) times[i] = times[i + 1] - kNudge;
        }
    }
}

}  // namespace

EventTrain simulate_exact(const ModelParams& params,
                          std::span<const TrialCovariates> trials, double T,
                          std::uint64_t seed) {
    if (!(T > 0.0)) throw ConfigError("simulation window must be positive");
    params.validate();
    Rng rng(seed);
    std::vector<double> times;

    const auto n_base = rng.poisson(params.mu * T);
    times.reserve(n_base);
    for (std::uint64_t i = 0; i < n_base; ++i) times.push_back(rng.uniform(0.0, T));

    if (params.variant != Variant::kHomogeneous) {
        for (const auto& trial : trials) {
            if (!trial.response_time_s.has_value()) continue;
            const double rho = *trial.response_time_s;
            if (rho >= T) continue;
            const double mass = 1.0 - std::exp(-(T - rho) / params.tau);
            const double mean_count = amplitude(params, trial) * params.tau * mass;
            const auto count = rng.poisson(mean_count);
            for (std::uint64_t i = 0; i < count; ++i) {
                // inverse CDF of the exponential truncated to [rho, T]
                const double u = rng.uniform01();
                times.push_back(rho - params.tau * std::log(1.0 - u * mass));
            }
        }
    }

    enforce_strict_order(times, T);
    EventTrain train;
    train.onsets = std::move(times);
    train.duration_s = T;
    train.validate();
    return train;
}

BinnedCounts simulate_binned(const ModelParams& params,
                             std::span<const TrialCovariates> trials, double dt, double T,
                             std::uint64_t seed) {
    if (!(dt > 0.0) || !(T >= dt)) throw ConfigError("invalid binning window");
    params.validate();
    Rng rng(seed);
    BinnedCounts out;
    out.dt = dt;
    out.T = T;
    const std::size_t n = bin_count(dt, T);
    out.counts.resize(n);
    const auto lambda = intensity_binned(params, trials, dt, T);
    for (std::size_t k = 0; k < n; ++k) {
        out.counts[k] = static_cast<int>(rng.poisson(lambda[k] * bin_width(k, dt, T)));
    }
    return out;
}

void CohortSpec::validate() const {
    if (groups.empty()) throw ConfigError("cohort needs at least one group");
    schedule.validate();
    bounds.validate();
    for (const auto& g : groups) {
        if (g.label.empty()) throw ConfigError("group label must be non-empty");
        if (g.n_subjects < 1) throw ConfigError("group needs at least one subject");
        ModelParams mean = g.theta.mean;
        if (mean.variant == Variant::kHomogeneous) {
            // only mu matters; fill placeholders inside the box
            mean.a0 = bounds.a0_lo;
            mean.tau = bounds.tau_lo;
        }
        if (!bounds.contains(bounds.clip(mean)) || mean.mu < bounds.mu_lo ||
            mean.mu > bounds.mu_hi ||
            (mean.variant != Variant::kHomogeneous &&
             (mean.a0 < bounds.a0_lo || mean.a0 > bounds.a0_hi || mean.tau < bounds.tau_lo ||
              mean.tau > bounds.tau_hi))) {
            throw ConfigError("group '" + g.label + "' mean parameters violate bounds");
        }
        if (g.theta.mu_sd < 0.0 || g.theta.a0_sd < 0.0 || g.theta.w_neg_sd < 0.0 ||
            g.theta.w_rt_sd < 0.0 || g.theta.w_err_sd < 0.0 || g.theta.tau_sd < 0.0) {
            throw ConfigError("parameter sds must be non-negative");
        }
    }
}

namespace {

double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
    if (sd <= 0.0) return std::min(std::max(mean, lo), hi);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double v = rng.normal(mean, sd);
        if (v >= lo && v <= hi) return v;
    }
    return std::min(std::max(mean, lo), hi);
}

}  // namespace

CohortDataset gen_cohort(const CohortSpec& spec) {
    spec.validate();
    CohortDataset cohort;
    int subject_counter = 0;
    for (const auto& group : spec.groups) {
        for (int i = 0; i < group.n_subjects; ++i) {
            ++subject_counter;
            char id[32];
            std::snprintf(id, sizeof(id), "%s%03d", spec.id_prefix.c_str(), subject_counter);

            const std::uint64_t subject_seed = derive_seed(spec.seed, id);
            Rng rng(subject_seed);

            ModelParams theta;
            theta.variant = group.theta.mean.variant;
            const auto& b = spec.bounds;
            const auto& d = group.theta;
            theta.mu = truncated_normal(rng, d.mean.mu, d.mu_sd, b.mu_lo, b.mu_hi);
            theta.a0 = truncated_normal(rng, d.mean.a0, d.a0_sd, b.a0_lo, b.a0_hi);
            theta.w_neg = truncated_normal(rng, d.mean.w_neg, d.w_neg_sd, b.w_lo, b.w_hi);
            theta.w_rt = truncated_normal(rng, d.mean.w_rt, d.w_rt_sd, b.w_lo, b.w_hi);
            theta.w_err = truncated_normal(rng, d.mean.w_err, d.w_err_sd, b.w_lo, b.w_hi);
            theta.tau = truncated_normal(rng, d.mean.tau, d.tau_sd, b.tau_lo, b.tau_hi);
            if (theta.variant == Variant::kHomogeneous) {
                theta.a0 = b.a0_lo;
                theta.tau = b.tau_lo;
                theta.w_neg = theta.w_rt = theta.w_err = 0.0;
            }

            CohortSubject subject;
            subject.label = group.label;
            subject.record.subject_id = id;
            Schedule schedule = gen_trial_schedule(spec.schedule, rng.next_u64());
            subject.raw_trials = std::move(schedule.raw);
            subject.record.trials = std::move(schedule.trials);
            subject.record.events =
                simulate_exact(theta, subject.record.trials, schedule.duration_s,
                               rng.next_u64());
            subject.record.validate();
            cohort.subjects.push_back(std::move(subject));
        }
    }
    return cohort;
}

}  // namespace edapp
