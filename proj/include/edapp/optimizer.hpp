#pragma once

#include <cstdint>
#include <vector>

#include "edapp/likelihood.hpp"
#include "edapp/types.hpp"

namespace edapp {

// Physiologically informed parameter box. Defaults are declared
// assumptions, echoed into every fit archive.
struct BoxBounds {
    double mu_lo = 1e-5, mu_hi = 1.0;    // events/s
    double a0_lo = 1e-5, a0_hi = 5.0;    // events/s
    double w_lo = -5.0, w_hi = 5.0;      // dimensionless
    double tau_lo = 0.5, tau_hi = 30.0;  // seconds

    void validate() const;
    ModelParams clip(const ModelParams& p) const;
    bool contains(const ModelParams& p) const;
};

struct FitReport {
    ModelParams params;
    double nll = 0.0;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_inf_norm = 0.0;  // projected-gradient infinity norm at the solution
    int n_restarts_used = 0;
    bool degenerate = false;  // zero-event subject fitted as a near-baseline model
};

struct FitOptions {
    RidgeConfig ridge;
    BoxBounds bounds;
    double dt = 1.0;
    int n_starts = 5;
    std::uint64_t seed = 0;
    int max_iterations = 500;
    double tol_grad = 1e-6;  // projected-gradient infinity norm
    double tol_obj = 1e-9;   // relative objective change per iteration
};

// Inputs the deterministic heuristic start is built from.
struct StartContext {
    Variant variant = Variant::kFull;
    std::size_t n_events = 0;
    std::size_t n_kernel_trials = 0;  // trials with a response timestamp
    double T = 1.0;
};

// Closed-form homogeneous fit: mu = clip(n/T, bounds).
FitReport fit_homogeneous(const BinnedCounts& counts, const BoxBounds& bounds = {});

// First start is the deterministic heuristic (mu = 0.5 n/T,
// a0 = 0.5 n/(N tau0), w = 0, tau0 = 5 s); the rest are seeded log-uniform
// rate/decay draws and uniform weight draws within bounds.
std::vector<ModelParams> multi_start_points(const BoxBounds& bounds, int n_starts,
                                            std::uint64_t seed, const StartContext& ctx);

// Box-constrained penalized maximum likelihood via projected limited-memory
// quasi-Newton (history 10, Armijo backtracking); tau is optimized in log
// space. Returns the best report across the multi-start list, augmented
// with a nested warm start (homogeneous -> trial-modulated -> full) so the
// variant-nesting invariant holds deterministically.
FitReport fit(Variant variant, const SubjectRecord& subject, const FitOptions& opts);

}  // namespace edapp
