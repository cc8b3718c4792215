#pragma once

#include <span>
#include <vector>

#include "edapp/types.hpp"

namespace edapp {

// Derives per-trial covariates: x_rt is the per-subject z-score of
// log(raw_rt_s) over answered trials (population standard deviation,
// zero-variance maps to 0); missed trials get x_rt = 0 and x_err = 1.
// Requires at least two answered trials.
std::vector<TrialCovariates> build_covariates(std::span<const RawTrial> raw);

// Kernel amplitude A_j = a0 * exp(w_neg x_neg + w_rt x_rt + w_err x_err).
// For the trial-modulated variant the covariates are ignored.
double amplitude(const ModelParams& params, const TrialCovariates& trial);

// Conditional intensity lambda(t) = mu + sum_j A_j exp(-(t - rho_j)/tau)
// over trials with a response at rho_j <= t. Events per second.
double intensity_at(const ModelParams& params, std::span<const TrialCovariates> trials,
                    double t);

// lambda evaluated at bin centers; ceil(T/dt) bins, the final partial bin
// (when T is not a multiple of dt) is centered within its true width.
std::vector<double> intensity_binned(const ModelParams& params,
                                     std::span<const TrialCovariates> trials, double dt,
                                     double T);

// Compensator: expected event count on [0, t],
// Lambda(t) = mu t + sum_{rho_j <= t} A_j tau (1 - exp(-(t - rho_j)/tau)).
double compensator(const ModelParams& params, std::span<const TrialCovariates> trials,
                   double t);

// Lambda evaluated at an ascending list of times in O(n + N) via the
// exponential-kernel decay recursion. Equal to compensator() up to
// floating-point rounding.
std::vector<double> compensator_at(const ModelParams& params,
                                   std::span<const TrialCovariates> trials,
                                   std::span<const double> ascending_times);

// Bin geometry shared by the binned likelihood and the simulators.
std::size_t bin_count(double dt, double T);
double bin_width(std::size_t k, double dt, double T);
double bin_center(std::size_t k, double dt, double T);

}  // namespace edapp
