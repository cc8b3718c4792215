#include "edapp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edapp/errors.hpp"

namespace edapp {

std::vector<TrialCovariates> build_covariates(std::span<const RawTrial> raw) {
    std::vector<double> log_rts;
    log_rts.reserve(raw.size());
    for (const auto& tr : raw) {
        if (tr.raw_rt_s.has_value()) {
            if (!(*tr.raw_rt_s > 0.0) || !std::isfinite(*tr.raw_rt_s)) {
                throw ValidationError("trial " + std::to_string(tr.trial_idx) +
                                      ": reaction time must be positive");
            }
            log_rts.push_back(std::log(*tr.raw_rt_s));
        }
    }
    if (log_rts.size() < 2) {
        throw DegenerateSubjectError(
            "fewer than two answered trials; cannot z-score reaction times");
    }

    double mean = 0.0;
    for (double v : log_rts) mean += v;
    mean /= static_cast<double>(log_rts.size());
    double var = 0.0;
    for (double v : log_rts) var += (v - mean) * (v - mean);
    var /= static_cast<double>(log_rts.size());  // population variance
    const double sd = std::sqrt(var);

    std::vector<TrialCovariates> out;
    out.reserve(raw.size());
    for (const auto& tr : raw) {
        TrialCovariates cov;
        cov.x_neg = tr.negative ? 1.0 : 0.0;
        if (tr.raw_rt_s.has_value()) {
            cov.raw_rt_s = tr.raw_rt_s;
            cov.response_time_s = tr.response_time_s;
            cov.x_rt = sd > 0.0 ? (std::log(*tr.raw_rt_s) - mean) / sd : 0.0;
            cov.x_err = tr.correct ? 0.0 : 1.0;
        } else {
            // missed response: no kernel trigger, neutral RT covariate
            cov.x_rt = 0.0;
            cov.x_err = 1.0;
        }
        out.push_back(cov);
    }
    return out;
}

double amplitude(const ModelParams& params, const TrialCovariates& trial) {
    switch (params.variant) {
        case Variant::kHomogeneous:
            throw ValidationError("amplitude is undefined for the homogeneous variant");
        case Variant::kTrialModulated:
            return params.a0;
        case Variant::kFull:
            return params.a0 * std::exp(params.w_neg * trial.x_neg + params.w_rt * trial.x_rt +
                                        params.w_err * trial.x_err);
    }
    return params.a0;
}

double intensity_at(const ModelParams& params, std::span<const TrialCovariates> trials,
                    double t) {
    if (params.variant == Variant::kHomogeneous) return params.mu;
    double sum = 0.0;
    for (const auto& trial : trials) {
        if (!trial.response_time_s.has_value()) continue;
        const double rho = *trial.response_time_s;
        if (t < rho) continue;
        sum += amplitude(params, trial) * std::exp(-(t - rho) / params.tau);
    }
    return params.mu + sum;
}

double compensator(const ModelParams& params, std::span<const TrialCovariates> trials,
                   double t) {
    double total = params.mu * t;
    if (params.variant == Variant::kHomogeneous) return total;
    for (const auto& trial : trials) {
        if (!trial.response_time_s.has_value()) continue;
        const double rho = *trial.response_time_s;
        if (t < rho) continue;
        total += amplitude(params, trial) * params.tau * (1.0 - std::exp(-(t - rho) / params.tau));
    }
    return total;
}

std::vector<double> compensator_at(const ModelParams& params,
                                   std::span<const TrialCovariates> trials,
                                   std::span<const double> ascending_times) {
    std::vector<double> out(ascending_times.size());
    if (params.variant == Variant::kHomogeneous) {
        for (std::size_t i = 0; i < ascending_times.size(); ++i) {
            out[i] = params.mu * ascending_times[i];
        }
        return out;
    }

    // Sorted kernel triggers (rho_j, A_j).
    std::vector<std::pair<double, double>> kernels;
    kernels.reserve(trials.size());
    for (const auto& trial : trials) {
        if (!trial.response_time_s.has_value()) continue;
        kernels.emplace_back(*trial.response_time_s, amplitude(params, trial));
    }
    std::sort(kernels.begin(), kernels.end());

    // Lambda(t) = mu t + tau * (sum_{rho<=t} A_j - decayed(t)) where
    // decayed(t) = sum_{rho<=t} A_j exp(-(t-rho)/tau) follows the usual
    // exponential recursion between successive evaluation times.
    const double tau = params.tau;
    double amp_total = 0.0;
    double decayed = 0.0;
    double prev_t = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < ascending_times.size(); ++i) {
        const double t = ascending_times[i];
        decayed *= std::exp(-(t - prev_t) / tau);
        while (next < kernels.size() && kernels[next].first <= t) {
            amp_total += kernels[next].second;
            decayed += kernels[next].second * std::exp(-(t - kernels[next].first) / tau);
            ++next;
        }
        out[i] = params.mu * t + tau * (amp_total - decayed);
        prev_t = t;
    }
    return out;
}

std::size_t bin_count(double dt, double T) {
    // tolerate fp noise when T is an exact multiple of dt
    const auto k = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    return std::max<std::size_t>(k, 1);
}

double bin_width(std::size_t k, double dt, double T) {
    const std::size_t n = bin_count(dt, T);
    if (k + 1 < n) return dt;
    return T - static_cast<double>(k) * dt;  // final bin keeps its true width
}

double bin_center(std::size_t k, double dt, double T) {
    return static_cast<double>(k) * dt + 0.5 * bin_width(k, dt, T);
}

std::vector<double> intensity_binned(const ModelParams& params,
                                     std::span<const TrialCovariates> trials, double dt,
                                     double T) {
    const std::size_t n = bin_count(dt, T);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = intensity_at(params, trials, bin_center(k, dt, T));
    }
    return out;
}

}  // namespace edapp
