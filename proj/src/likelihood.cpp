#include "edapp/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edapp/errors.hpp"

namespace edapp {

void BinnedCounts::validate() const {
    if (!(dt > 0.0)) throw ValidationError("bin width must be positive");
    if (!(T >= dt)) throw ValidationError("window must cover at least one bin");
    if (counts.size() != bin_count(dt, T)) {
        throw ValidationError("bin vector length does not match ceil(T/dt)");
    }
    for (int c : counts) {
        if (c < 0) throw ValidationError("bin counts must be non-negative");
    }
}

void RidgeConfig::validate() const {
    if (lambda_neg < 0.0 || lambda_rt < 0.0 || lambda_err < 0.0) {
        throw ValidationError("ridge strengths must be non-negative");
    }
}

BinnedCounts bin_events(const EventTrain& events, double dt) {
    if (!(dt > 0.0)) throw ValidationError("bin width must be positive");
    BinnedCounts out;
    out.dt = dt;
    out.T = events.duration_s;
    out.counts.assign(bin_count(dt, events.duration_s), 0);
    const auto last = out.counts.size() - 1;
    for (double t : events.onsets) {
        auto k = static_cast<std::size_t>(t / dt);
        if (k > last) k = last;  // onsets exactly at T land in the last bin
        ++out.counts[k];
    }
    return out;
}

namespace {

struct Kernel {
    double rho;
    double amp;
    double x_neg;
    double x_rt;
    double x_err;
};

// One pass over bin centers, advancing five running kernel sums by the
// exponential decay recursion. visit(k, lambda, kernel_sum, s_neg, s_rt,
// s_err, age_sum) is called once per bin.
template <typename Visit>
void sweep_bins(const ModelParams& params, std::span<const TrialCovariates> trials,
                double dt, double T, Visit&& visit) {
    const std::size_t n_bins = bin_count(dt, T);
    if (params.variant == Variant::kHomogeneous) {
        for (std::size_t k = 0; k < n_bins; ++k) {
            visit(k, params.mu, 0.0, 0.0, 0.0, 0.0, 0.0);
        }
        return;
    }

    std::vector<Kernel> kernels;
    kernels.reserve(trials.size());
    for (const auto& trial : trials) {
        if (!trial.response_time_s.has_value()) continue;
        kernels.push_back({*trial.response_time_s, amplitude(params, trial), trial.x_neg,
                           trial.x_rt, trial.x_err});
    }
    std::sort(kernels.begin(), kernels.end(),
              [](const Kernel& a, const Kernel& b) { return a.rho < b.rho; });

    const double tau = params.tau;
    double s = 0.0;                              // sum A_j exp(-(t-rho_j)/tau)
    double s_neg = 0.0, s_rt = 0.0, s_err = 0.0; // covariate-weighted sums
    double g = 0.0;                              // sum A_j (t-rho_j) exp(...)
    double prev_t = bin_center(0, dt, T);
    std::size_t next = 0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double t = bin_center(k, dt, T);
        const double step = t - prev_t;
        if (step > 0.0) {
            const double decay = std::exp(-step / tau);
            g = decay * (g + step * s);
            s *= decay;
            s_neg *= decay;
            s_rt *= decay;
            s_err *= decay;
        }
        while (next < kernels.size() && kernels[next].rho <= t) {
            const Kernel& kn = kernels[next];
            const double age = t - kn.rho;
            const double e = kn.amp * std::exp(-age / tau);
            s += e;
            s_neg += e * kn.x_neg;
            s_rt += e * kn.x_rt;
            s_err += e * kn.x_err;
            g += e * age;
            ++next;
        }
        visit(k, params.mu + s, s, s_neg, s_rt, s_err, g);
        prev_t = t;
    }
}

}  // namespace

double penalty(const ModelParams& params, const RidgeConfig& ridge) {
    if (params.variant != Variant::kFull) return 0.0;
    return ridge.lambda_neg * params.w_neg * params.w_neg +
           ridge.lambda_rt * params.w_rt * params.w_rt +
           ridge.lambda_err * params.w_err * params.w_err;
}

ObjectiveEval eval_objective(const ModelParams& params,
                             std::span<const TrialCovariates> trials,
                             const BinnedCounts& counts, const RidgeConfig& ridge) {
    counts.validate();
    ObjectiveEval ev;
    const bool full = params.variant == Variant::kFull;
    const bool trial_mod = params.variant == Variant::kTrialModulated;
    bool ok = true;
    sweep_bins(params, trials, counts.dt, counts.T,
               [&](std::size_t k, double lambda, double kernel_sum, double s_neg, double s_rt,
                   double s_err, double age_sum) {
                   const double width = bin_width(k, counts.dt, counts.T);
                   const double expected = lambda * width;
                   const double y = counts.counts[k];
                   if (!std::isfinite(expected) || expected <= 0.0) {
                       ok = false;
                       return;
                   }
                   ev.nll += expected;
                   if (y > 0.0) ev.nll -= y * std::log(expected);
                   // d nll / d theta = sum_k (width - y/lambda) dlambda/dtheta
                   const double c = width - (y > 0.0 ? y / lambda : 0.0);
                   ev.gradient[0] += c;
                   if (full || trial_mod) {
                       ev.gradient[1] += c * kernel_sum / params.a0;
                       ev.gradient[5] += c * age_sum / (params.tau * params.tau);
                   }
                   if (full) {
                       ev.gradient[2] += c * s_neg;
                       ev.gradient[3] += c * s_rt;
                       ev.gradient[4] += c * s_err;
                   }
               });
    if (!ok || !std::isfinite(ev.nll)) {
        throw NumericError("non-finite intensity in likelihood evaluation");
    }
    ev.objective = ev.nll + penalty(params, ridge);
    if (full) {
        ev.gradient[2] += 2.0 * ridge.lambda_neg * params.w_neg;
        ev.gradient[3] += 2.0 * ridge.lambda_rt * params.w_rt;
        ev.gradient[4] += 2.0 * ridge.lambda_err * params.w_err;
    }
    return ev;
}

double nll(const ModelParams& params, std::span<const TrialCovariates> trials,
           const BinnedCounts& counts) {
    return eval_objective(params, trials, counts, RidgeConfig{0.0, 0.0, 0.0}).nll;
}

double objective(const ModelParams& params, std::span<const TrialCovariates> trials,
                 const BinnedCounts& counts, const RidgeConfig& ridge) {
    return eval_objective(params, trials, counts, ridge).objective;
}

std::array<double, 6> gradient(const ModelParams& params,
                               std::span<const TrialCovariates> trials,
                               const BinnedCounts& counts, const RidgeConfig& ridge) {
    return eval_objective(params, trials, counts, ridge).gradient;
}

}  // namespace edapp
