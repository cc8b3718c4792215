#pragma once

#include <array>
#include <span>
#include <vector>

#include "edapp/model.hpp"
#include "edapp/types.hpp"

namespace edapp {

struct BinnedCounts {
    std::vector<int> counts;  // events per bin
    double dt = 1.0;          // nominal bin width, seconds
    double T = 0.0;           // window length, seconds

    void validate() const;
};

// Quadratic penalty strengths for the covariate weights. The error weight
// carries stronger default regularization because errors are rare.
struct RidgeConfig {
    double lambda_neg = 1.0;
    double lambda_rt = 1.0;
    double lambda_err = 5.0;

    void validate() const;
};

// y_k = number of onsets in [k dt, (k+1) dt); an onset exactly at T lands
// in the last bin.
BinnedCounts bin_events(const EventTrain& events, double dt);

// Binned Poisson negative log-likelihood
//   sum_k lambda(t_k) w_k - sum_k y_k log(lambda(t_k) w_k)
// with t_k the bin centers and w_k the bin widths (the final partial bin
// keeps its true width in both terms).
double nll(const ModelParams& params, std::span<const TrialCovariates> trials,
           const BinnedCounts& counts);

// lambda_neg w_neg^2 + lambda_rt w_rt^2 + lambda_err w_err^2; zero for
// variants without covariate weights.
double penalty(const ModelParams& params, const RidgeConfig& ridge);

double objective(const ModelParams& params, std::span<const TrialCovariates> trials,
                 const BinnedCounts& counts, const RidgeConfig& ridge);

// Analytic gradient of the penalized objective in the order
// (mu, a0, w_neg, w_rt, w_err, tau); components of parameters unused by the
// variant are zero.
std::array<double, 6> gradient(const ModelParams& params,
                               std::span<const TrialCovariates> trials,
                               const BinnedCounts& counts, const RidgeConfig& ridge);

// Single-pass evaluation of nll, penalized objective, and gradient.
struct ObjectiveEval {
    double nll = 0.0;
    double objective = 0.0;
    std::array<double, 6> gradient{};
};

ObjectiveEval eval_objective(const ModelParams& params,
                             std::span<const TrialCovariates> trials,
                             const BinnedCounts& counts, const RidgeConfig& ridge);

}  // namespace edapp
